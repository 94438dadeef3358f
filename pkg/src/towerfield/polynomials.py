"""Exact multivariate polynomials and rational functions over Q.

Polynomials are stored sparsely as a mapping from exponent tuples to nonzero
`Fraction` coefficients.  Every tuple has length ``nvars``; variable slots are
ordered by creation order of the generators they stand for, and the monomial
order used for leading-term questions is plain lexicographic comparison of
exponent tuples (slot 0 most significant).

`RatFunc` keeps a numerator/denominator pair in a canonical reduced form:

* the polynomial gcd of numerator and denominator is constant,
* the denominator is integer-primitive with a positive leading coefficient,
* the leftover rational factor lives in the numerator's coefficients.

Two equal rational functions therefore have bit-identical representations,
which is what the rest of the package leans on for canonical normal forms and
deterministic text dumps.

The gcd is a primitive polynomial-remainder-sequence built from pseudo
divisions, recursing on the last occurring variable; univariate inputs with
constant coefficients take a cheap monic-Euclid fast path.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

ZERO = Fraction(0)
ONE = Fraction(1)


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    """Positive generator of the fractional ideal (a, b); 0 for (0, 0)."""
    num = _int_gcd(a.numerator, b.numerator)
    den = (a.denominator * b.denominator) // _int_gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def integer_root(n: int, q: int) -> int:
    """Floor of the q-th root of a nonnegative integer."""
    if n < 0:
        raise ValueError("integer_root expects n >= 0")
    if n == 0:
        return 0
    x = 1 << ((n.bit_length() + q - 1) // q)
    while True:
        y = ((q - 1) * x + n // x ** (q - 1)) // q
        if y >= x:
            return x
        x = y


def rational_qth_root(value: Fraction, q: int) -> Fraction | None:
    """Exact q-th root of a rational for odd q, or None if there is none."""
    if value == 0:
        return ZERO
    sign = 1 if value > 0 else -1
    num = abs(value.numerator)
    den = value.denominator
    rn = integer_root(num, q)
    if rn ** q != num:
        return None
    rd = integer_root(den, q)
    if rd ** q != den:
        return None
    return Fraction(sign * rn, rd)


class MPoly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("nvars", "terms", "_key")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        if terms:
            self.terms = {e: c for e, c in terms.items() if c != 0}
        else:
            self.terms = {}
        self._key = None

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, value: Fraction) -> "MPoly":
        value = Fraction(value)
        if value == 0:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def one(cls, nvars: int) -> "MPoly":
        return cls.const(nvars, ONE)

    @classmethod
    def var(cls, nvars: int, index: int, exp: int = 1) -> "MPoly":
        key = [0] * nvars
        key[index] = exp
        return cls(nvars, {tuple(key): ONE})

    # -- basic queries --------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(all(e == 0 for e in key) for key in self.terms)

    def const_value(self) -> Fraction:
        if self.is_zero:
            return ZERO
        [(key, coeff)] = self.terms.items()
        if any(key):
            raise ValueError("not a constant polynomial")
        return coeff

    def lead_key(self) -> tuple:
        return max(self.terms)

    def lead_coeff(self) -> Fraction:
        return self.terms[self.lead_key()]

    def total_degree(self) -> int:
        if self.is_zero:
            return 0
        return max(sum(k) for k in self.terms)

    def degree_in(self, var: int) -> int:
        if self.is_zero:
            return 0
        return max(k[var] for k in self.terms)

    def occurring_vars(self) -> set:
        out = set()
        for key in self.terms:
            for i, e in enumerate(key):
                if e:
                    out.add(i)
        return out

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self.terms.items()))
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, MPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, self.key()))

    def __repr__(self) -> str:
        return f"MPoly({self.nvars}, {self.terms!r})"

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "MPoly") -> "MPoly":
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            s = out.get(key, ZERO) + coeff
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return MPoly(self.nvars, out)

    def __neg__(self) -> "MPoly":
        return MPoly(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other: "MPoly") -> "MPoly":
        out: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ka, kb))
                s = out.get(key, ZERO) + ca * cb
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        return MPoly(self.nvars, out)

    def mul_scalar(self, value: Fraction) -> "MPoly":
        if value == 0:
            return MPoly(self.nvars)
        return MPoly(self.nvars, {k: c * value for k, c in self.terms.items()})

    def __pow__(self, exp: int) -> "MPoly":
        if exp < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.one(self.nvars)
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def derivative(self, var: int) -> "MPoly":
        out: dict = {}
        for key, coeff in self.terms.items():
            e = key[var]
            if e:
                nk = key[:var] + (e - 1,) + key[var + 1 :]
                s = out.get(nk, ZERO) + coeff * e
                if s == 0:
                    out.pop(nk, None)
                else:
                    out[nk] = s
        return MPoly(self.nvars, out)

    def substitute_var(self, var: int, value: Fraction) -> "MPoly":
        """Evaluate one variable at a rational and drop its slot."""
        out: dict = {}
        for key, coeff in self.terms.items():
            c = coeff * value ** key[var]
            nk = key[:var] + key[var + 1 :]
            s = out.get(nk, ZERO) + c
            if s == 0:
                out.pop(nk, None)
            else:
                out[nk] = s
        return MPoly(self.nvars - 1, out)

    def pad(self, extra: int) -> "MPoly":
        """Append `extra` fresh zero-exponent slots (tower embedding)."""
        if extra == 0:
            return self
        tail = (0,) * extra
        return MPoly(self.nvars + extra, {k + tail: c for k, c in self.terms.items()})

    # -- normalization helpers -----------------------------------------

    def signed_content(self) -> Fraction:
        """Fraction c with self/c integer-primitive and positive leading coeff."""
        if self.is_zero:
            return ZERO
        c = ZERO
        for coeff in self.terms.values():
            c = _frac_gcd(c, coeff)
        if self.lead_coeff() < 0:
            c = -c
        return c

    def primitive(self) -> "MPoly":
        """self divided by its signed content (zero stays zero)."""
        if self.is_zero:
            return self
        c = self.signed_content()
        return MPoly(self.nvars, {k: v / c for k, v in self.terms.items()})

    def divexact(self, divisor: "MPoly") -> "MPoly":
        """Exact polynomial division; raises ValueError if it does not divide."""
        if divisor.is_zero:
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero:
            return MPoly(self.nvars)
        if divisor.is_constant:
            return self.mul_scalar(1 / divisor.const_value())
        rem = MPoly(self.nvars, dict(self.terms))
        out: dict = {}
        dk = divisor.lead_key()
        dc = divisor.terms[dk]
        while not rem.is_zero:
            rk = rem.lead_key()
            qk = tuple(a - b for a, b in zip(rk, dk))
            if any(e < 0 for e in qk):
                raise ValueError("not an exact polynomial division")
            qc = rem.terms[rk] / dc
            out[qk] = out.get(qk, ZERO) + qc
            rem = rem - MPoly(self.nvars, {qk: qc}) * divisor
        return MPoly(self.nvars, out)


# ---------------------------------------------------------------------------
# gcd machinery
# ---------------------------------------------------------------------------


def _univar_profile(poly: MPoly):
    """(var,) if poly is univariate with constant coefficients, else None."""
    seen = None
    for key in poly.terms:
        nz = [i for i, e in enumerate(key) if e]
        if len(nz) > 1:
            return None
        if nz:
            if seen is None:
                seen = nz[0]
            elif seen != nz[0]:
                return None
    return seen


def _univar_gcd(f: MPoly, g: MPoly, var: int) -> MPoly:
    """Primitive PRS over the integers for effectively-univariate operands."""

    def to_int(p: MPoly) -> dict:
        c = p.signed_content()
        return {k[var]: int(v / c) for k, v in p.terms.items()}

    def strip(d: dict) -> dict:
        c = 0
        for v in d.values():
            c = _int_gcd(c, v)
        return d if c in (0, 1) else {e: v // c for e, v in d.items()}

    fa, fb = to_int(f), to_int(g)
    if max(fa) < max(fb):
        fa, fb = fb, fa
    while fb:
        db = max(fb)
        lb = fb[db]
        rem = dict(fa)
        while rem:
            dr = max(rem)
            if dr < db:
                break
            lr = rem.pop(dr)
            nr = {e: lb * v for e, v in rem.items()}
            for e, v in fb.items():
                if e == db:
                    continue
                ne = e + dr - db
                s = nr.get(ne, 0) - lr * v
                if s:
                    nr[ne] = s
                else:
                    nr.pop(ne, None)
            rem = nr
        fa, fb = fb, strip(rem)
    nvars = f.nvars
    sign = 1 if fa[max(fa)] > 0 else -1
    out: dict = {}
    for e, v in fa.items():
        key = [0] * nvars
        key[var] = e
        out[tuple(key)] = Fraction(sign * v)
    return MPoly(nvars, out)


def _to_univar(poly: MPoly, var: int) -> dict:
    """View as univariate in `var`: degree -> MPoly coefficient (slot zeroed)."""
    out: dict = {}
    for key, coeff in poly.terms.items():
        deg = key[var]
        nk = key[:var] + (0,) + key[var + 1 :]
        part = out.setdefault(deg, {})
        part[nk] = part.get(nk, ZERO) + coeff
    return {d: MPoly(poly.nvars, t) for d, t in out.items() if any(c != 0 for c in t.values())}


def _from_univar(coeffs: dict, var: int, nvars: int) -> MPoly:
    out: dict = {}
    for deg, poly in coeffs.items():
        for key, coeff in poly.terms.items():
            nk = key[:var] + (deg,) + key[var + 1 :]
            out[nk] = out.get(nk, ZERO) + coeff
    return MPoly(nvars, out)


def _uv_content(coeffs: dict) -> MPoly:
    cont = None
    for poly in coeffs.values():
        cont = poly if cont is None else mpoly_gcd(cont, poly)
        if cont.is_constant and not cont.is_zero:
            return MPoly.one(cont.nvars)
    return cont


def _uv_primitive(coeffs: dict) -> dict:
    cont = _uv_content(coeffs)
    if cont.is_constant:
        c = cont.const_value()
        if c == 1:
            return coeffs
        return {d: p.mul_scalar(1 / c) for d, p in coeffs.items()}
    return {d: p.divexact(cont) for d, p in coeffs.items()}


def _pseudo_rem(fu: dict, gu: dict) -> dict:
    """Pseudo remainder of univariate views (coefficients are MPoly)."""
    lg_deg = max(gu)
    lg = gu[lg_deg]
    rem = dict(fu)
    while rem:
        rd = max(rem)
        if rd < lg_deg:
            break
        lr = rem[rd]
        shift = rd - lg_deg
        new: dict = {}
        for d, p in rem.items():
            new[d] = p * lg
        for d, p in gu.items():
            nd = d + shift
            q = new.get(nd)
            prod = p * lr
            new[nd] = (q - prod) if q is not None else -prod
        rem = {d: p for d, p in new.items() if not p.is_zero}
    return rem


def _heu_eval(terms: dict, var: int, xi: int) -> dict:
    """Integer evaluation of one variable; keys keep their arity."""
    powers = {}
    out: dict = {}
    for key, c in terms.items():
        e = key[var]
        p = powers.get(e)
        if p is None:
            p = powers[e] = xi**e
        nk = key[:var] + (0,) + key[var + 1 :]
        out[nk] = out.get(nk, 0) + c * p
    return {k: v for k, v in out.items() if v}


def _heu_occurring(terms: dict) -> set:
    out: set = set()
    for key in terms:
        for i, e in enumerate(key):
            if e:
                out.add(i)
    return out


def _heu_content(terms: dict) -> int:
    c = 0
    for v in terms.values():
        c = _int_gcd(c, v)
    return c


def _heu_interpolate(h: dict, var: int, xi: int) -> dict:
    """Recover the var-dependence of h from symmetric base-xi digits."""
    cand: dict = {}
    power = 0
    cur = h
    while cur:
        nxt = {}
        for k, c in cur.items():
            r = c % xi
            if r > xi // 2:
                r -= xi
            if r:
                nk = k[:var] + (power,) + k[var + 1 :]
                cand[nk] = cand.get(nk, 0) + r
            q = (c - r) // xi
            if q:
                nxt[k] = q
        cur = nxt
        power += 1
    return {k: v for k, v in cand.items() if v}


_PRETEST_PRIME = (1 << 61) - 1
_PRETEST_POINTS = ((3, 5, 7, 11, 13, 17), (19, 23, 29, 31, 37, 41), (43, 47, 53, 59, 61, 67))


def _image_mod(poly: MPoly, mults: tuple, p: int) -> list | None:
    """Dense coefficient list of poly(c_0*t, c_1*t, ...) over Z_p, or None."""
    deg = poly.total_degree()
    out = [0] * (deg + 1)
    pows = [{} for _ in range(poly.nvars)]
    for key, coeff in poly.terms.items():
        den = coeff.denominator % p
        if den == 0:
            return None
        c = coeff.numerator % p * pow(den, p - 2, p) % p
        for i, e in enumerate(key):
            if e:
                cache = pows[i]
                pe = cache.get(e)
                if pe is None:
                    pe = cache[e] = pow(mults[i % len(mults)], e, p)
                c = c * pe % p
        d = sum(key)
        out[d] = (out[d] + c) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def _uni_gcd_mod(a: list, b: list, p: int) -> int:
    """Degree of gcd of two dense Z_p coefficient lists."""
    while b:
        inv = pow(b[-1], p - 2, p)
        while len(a) >= len(b):
            factor = a[-1] * inv % p
            off = len(a) - len(b)
            for i in range(len(b) - 1):
                a[off + i] = (a[off + i] - factor * b[i]) % p
            a.pop()
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    return len(a) - 1


def _coprime_pretest(f: MPoly, g: MPoly) -> bool:
    """True only if gcd(f, g) == 1 is proven by a univariate image mod p.

    Substituting x_i -> c_i * t maps any common divisor to a common divisor
    of the images; when f's image keeps f's full total degree, the image of
    each divisor of f keeps full degree too, so a constant image gcd forces
    a constant gcd.  A False return proves nothing.
    """
    p = _PRETEST_PRIME
    fdeg = f.total_degree()
    for mults in _PRETEST_POINTS:
        fi = _image_mod(f, mults, p)
        if fi is None:
            return False
        if len(fi) - 1 != fdeg:
            continue
        gi = _image_mod(g, mults, p)
        if gi is None or not gi:
            return False
        return _uni_gcd_mod(fi, gi, p) == 0
    return False


def _heu_gcd(fterms: dict, gterms: dict) -> dict | None:
    """Heuristic gcd (with integer content) of integer term dicts.

    Contents are split off first and their gcd is multiplied back into the
    result, because at outer recursion levels the content of an evaluated
    image carries the eliminated variable's contribution to the gcd.
    Returns None when every evaluation point was unlucky.
    """
    cf = _heu_content(fterms)
    cg = _heu_content(gterms)
    c = _int_gcd(cf, cg)
    fterms = {k: v // cf for k, v in fterms.items()}
    gterms = {k: v // cg for k, v in gterms.items()}
    live = _heu_occurring(fterms) | _heu_occurring(gterms)
    if not live:
        [kf] = fterms
        return {kf: c}
    var = max(live)
    fmax = max(abs(v) for v in fterms.values())
    gmax = max(abs(v) for v in gterms.values())
    xi = 2 * min(fmax, gmax) + 29
    for _ in range(6):
        fe = _heu_eval(fterms, var, xi)
        ge = _heu_eval(gterms, var, xi)
        if fe and ge:
            h = _heu_gcd(fe, ge)
            if h is not None:
                cand = _heu_interpolate(h, var, xi)
                content = _heu_content(cand)
                if content > 1:
                    cand = {k: v // content for k, v in cand.items()}
                if cand:
                    nvars = len(next(iter(cand)))
                    H = MPoly(nvars, {k: Fraction(v) for k, v in cand.items()})
                    FP = MPoly(nvars, {k: Fraction(v) for k, v in fterms.items()})
                    GP = MPoly(nvars, {k: Fraction(v) for k, v in gterms.items()})
                    try:
                        FP.divexact(H)
                        GP.divexact(H)
                    except ValueError:
                        pass
                    else:
                        return {k: c * int(v) for k, v in H.terms.items()}
        xi = xi * 73794 // 27011
    return None


# -- modular bivariate gcd -------------------------------------------------


def _is_prime_64(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond 64-bit inputs."""
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_MOD_PRIMES: list = []


def _mod_prime(i: int) -> int:
    """i-th member of a fixed descending sequence of 62-bit primes."""
    while len(_MOD_PRIMES) <= i:
        n = (_MOD_PRIMES[-1] if _MOD_PRIMES else (1 << 62)) - 1
        while not _is_prime_64(n):
            n -= 1
        _MOD_PRIMES.append(n)
    return _MOD_PRIMES[i]


def _zp_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _zp_gcd_list(a: list, b: list, p: int) -> list:
    """Monic gcd of two dense Z_p coefficient lists (low degree first)."""
    a = _zp_trim(list(a))
    b = _zp_trim(list(b))
    while b:
        if len(a) < len(b):
            a, b = b, a
            continue
        inv = pow(b[-1], p - 2, p)
        db = len(b) - 1
        while len(a) > db:
            c = a[-1] * inv % p
            if c:
                off = len(a) - 1 - db
                for i in range(db):
                    if b[i]:
                        a[off + i] = (a[off + i] - c * b[i]) % p
            a.pop()
            _zp_trim(a)
            if not a:
                break
        a, b = b, a
    inv = pow(a[-1], p - 2, p)
    return [v * inv % p for v in a]


def _zp_div_list(a: list, b: list, p: int) -> list:
    """Exact quotient of dense Z_p lists (remainder known to vanish)."""
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    db = len(b) - 1
    q = [0] * (len(a) - db)
    for pos in range(len(a) - 1, db - 1, -1):
        c = a[pos] * inv % p
        q[pos - db] = c
        if c:
            off = pos - db
            for i in range(db + 1):
                a[off + i] = (a[off + i] - c * b[i]) % p
    return q


def _zp_eval_rows(rows: list, b: int, p: int) -> list:
    """Evaluate rows (outer = interp var, inner = dense main var) at b."""
    acc = [0] * len(rows[0])
    for row in reversed(rows):
        for i, v in enumerate(row):
            acc[i] = (acc[i] * b + v) % p
    return acc


def _zp_eval_list(a: list, b: int, p: int) -> int:
    acc = 0
    for v in reversed(a):
        acc = (acc * b + v) % p
    return acc


def _crt_pair(a: int, ma: int, b: int, p: int) -> int:
    t = (b - a) % p * pow(ma % p, p - 2, p) % p
    return a + ma * t


def _mod_gcd_biv(fp: MPoly, gp: MPoly) -> MPoly | None:
    """Modular gcd of an integer-primitive pair with two occurring variables.

    Works variable-at-a-time: dense images modulo 62-bit primes, a univariate
    Euclid per interpolation point, Newton interpolation in the lower-degree
    variable, CRT across primes with symmetric lifting, and an exact-division
    verification of the lifted candidate.  Returns None if the prime budget
    is exhausted (the caller then falls back to a remainder sequence).
    """
    nv = fp.nvars
    live = sorted(fp.occurring_vars() | gp.occurring_vars())
    va, vb = live
    da = max(max(k[va] for k in fp.terms), max(k[va] for k in gp.terms))
    db = max(max(k[vb] for k in fp.terms), max(k[vb] for k in gp.terms))
    vx, vy = (va, vb) if da >= db else (vb, va)

    def columns(poly: MPoly) -> list:
        dx = max(k[vx] for k in poly.terms)
        cols: list = [dict() for _ in range(dx + 1)]
        for k, c in poly.terms.items():
            nk = k[:vx] + (0,) + k[vx + 1 :]
            cols[k[vx]][nk] = c
        return [MPoly(nv, d) for d in cols]

    def col_content(cols: list) -> MPoly:
        acc = None
        for c in cols:
            if c.is_zero:
                continue
            acc = c.primitive() if acc is None else mpoly_gcd(acc, c)
            if acc.is_constant:
                return MPoly.one(nv)
        return acc

    fcols = columns(fp)
    gcols = columns(gp)
    contf = col_content(fcols)
    contg = col_content(gcols)
    if not contf.is_constant:
        fcols = [c.divexact(contf) for c in fcols]
    if not contg.is_constant:
        gcols = [c.divexact(contg) for c in gcols]
    cont_gcd = mpoly_gcd(contf, contg)

    def rebuild(cols: list) -> dict:
        out = {}
        for i, c in enumerate(cols):
            for k, v in c.terms.items():
                out[k[:vx] + (i,) + k[vx + 1 :]] = int(v)
        return out

    fT = rebuild(fcols)
    gT = rebuild(gcols)
    if len(fT) == 1 and not any(next(iter(fT))) or len(gT) == 1 and not any(next(iter(gT))):
        return cont_gcd.primitive() if not cont_gcd.is_constant else MPoly.one(nv)
    gamma = mpoly_gcd(fcols[-1], gcols[-1])
    dgam = max((k[vy] for k in gamma.terms), default=0)
    gam_int = {k[vy]: int(v) for k, v in gamma.terms.items()}
    lead_f = fT[max(fT)]
    lead_g = gT[max(gT)]
    big_gam = _int_gcd(lead_f, lead_g)
    dxf = len(fcols) - 1
    dxg = len(gcols) - 1
    dyf = max(k[vy] for k in fT)
    dyg = max(k[vy] for k in gT)
    ybound = min(dyf, dyg) + dgam

    crt: dict = {}
    crt_mod = 1
    prev_lift = None
    profile = None
    allow_early = True
    dymax = max(dyf, dyg, ybound + 1)
    for pi in range(25):
        p = _mod_prime(pi)
        if big_gam % p == 0:
            continue
        fspar = [(k[vx], k[vy], c % p) for k, c in fT.items() if c % p]
        gspar = [(k[vx], k[vy], c % p) for k, c in gT.items() if c % p]
        gam_list = [0] * (dgam + 1)
        for e, c in gam_int.items():
            gam_list[e] = c % p
        if not any(gam_list):
            continue
        dmin = None
        gacc: list = []
        mpol = [1]
        npts = 0
        done = False
        constant_gcd = False
        b = 0
        while not done and b < p - 1:
            b += 1
            bpow = [1] * (dymax + 1)
            acc = 1
            for j in range(1, dymax + 1):
                acc = acc * b % p
                bpow[j] = acc
            fb = [0] * (dxf + 1)
            for i, j, c in fspar:
                fb[i] = (fb[i] + c * bpow[j]) % p
            if fb[-1] == 0:
                continue
            gb = [0] * (dxg + 1)
            for i, j, c in gspar:
                gb[i] = (gb[i] + c * bpow[j]) % p
            if gb[-1] == 0:
                continue
            u = _zp_gcd_list(fb, gb, p)
            du = len(u) - 1
            if du == 0:
                constant_gcd = True
                break
            if dmin is None or du < dmin:
                dmin = du
                gacc = []
                mpol = [1]
                npts = 0
            elif du > dmin:
                continue
            gval = _zp_eval_list(gam_list, b, p)
            if gval == 0:
                continue
            w = [v * gval % p for v in u]
            if gacc:
                cur = [0] * (dmin + 1)
                for j, row in enumerate(gacc):
                    bj = bpow[j]
                    if bj:
                        cur = [(cv + bj * rv) % p for cv, rv in zip(cur, row)]
                diff = [(w[i] - cur[i]) % p for i in range(dmin + 1)]
            else:
                diff = w
            if any(diff):
                mb = _zp_eval_list(mpol, b, p)
                minv = pow(mb, p - 2, p)
                cvec = [d * minv % p for d in diff]
                while len(gacc) < len(mpol):
                    gacc.append([0] * (dmin + 1))
                for j, mc in enumerate(mpol):
                    if mc:
                        row = gacc[j]
                        gacc[j] = [(rv + mc * cv) % p for rv, cv in zip(row, cvec)]
                mpol = [0] + mpol
                for j in range(len(mpol) - 1):
                    mpol[j] = (mpol[j] - b * mpol[j + 1]) % p
                npts += 1
                if npts > ybound:
                    done = True
            elif npts and (allow_early or npts > ybound):
                done = True
        if constant_gcd:
            return cont_gcd.primitive() if not cont_gcd.is_constant else MPoly.one(nv)
        if not done:
            continue
        while gacc and not any(gacc[-1]):
            gacc.pop()
        cols_p = [[gacc[j][i] for j in range(len(gacc))] for i in range(dmin + 1)]
        excess = None
        for col in cols_p:
            cl = _zp_trim(list(col))
            if not cl:
                continue
            excess = cl if excess is None else _zp_gcd_list(excess, cl, p)
            if len(excess) == 1:
                break
        if excess is not None and len(excess) > 1:
            cols_p = [
                _zp_div_list(_zp_trim(list(col)), excess, p) if any(col) else []
                for col in cols_p
            ]
        cand_p = {}
        for i, col in enumerate(cols_p):
            for j, v in enumerate(col):
                if v:
                    key = [0] * nv
                    key[vx] = i
                    key[vy] = j
                    cand_p[tuple(key)] = v
        lead_key = max(cand_p)
        scale = big_gam % p * pow(cand_p[lead_key], p - 2, p) % p
        cand_p = {k: v * scale % p for k, v in cand_p.items()}
        prof = (dmin, max(k[vy] for k in cand_p), lead_key)

        def try_candidate(lifted: dict) -> MPoly | None:
            cand = MPoly(nv, {k: Fraction(v) for k, v in lifted.items()}).primitive()
            final = cand if cont_gcd.is_constant else (cand * cont_gcd).primitive()
            try:
                fp.divexact(final)
                gp.divexact(final)
            except ValueError:
                return None
            return final

        if profile is None or prof < profile:
            profile = prof
            crt = dict(cand_p)
            crt_mod = p
            half = p // 2
            prev_lift = {
                k: (v if v <= half else v - p) for k, v in cand_p.items() if v
            }
            found = try_candidate(prev_lift)
            if found is not None:
                return found
            continue
        if prof > profile:
            continue
        keys = set(crt) | set(cand_p)
        crt = {
            k: _crt_pair(crt.get(k, 0), crt_mod, cand_p.get(k, 0), p) for k in keys
        }
        crt_mod *= p
        half = crt_mod // 2
        lifted = {}
        for k, v in crt.items():
            sv = v if v <= half else v - crt_mod
            if sv:
                lifted[k] = sv
        if prev_lift == lifted:
            found = try_candidate(lifted)
            if found is not None:
                return found
            allow_early = False
            prev_lift = None
            continue
        prev_lift = lifted
        found = try_candidate(lifted)
        if found is not None:
            return found
    return None


def mpoly_gcd(f: MPoly, g: MPoly) -> MPoly:
    """Primitive positive-leading gcd of two polynomials over Q.

    The result is integer-primitive with positive leading coefficient; for a
    pair of nonzero constants it is 1, and gcd(0, 0) = 0.  Dispatches to an
    integer evaluation/reconstruction pass first and falls back to a primitive
    remainder sequence when the evaluations are unlucky.
    """
    if f.is_zero:
        return g.primitive()
    if g.is_zero:
        return f.primitive()
    if f.is_constant or g.is_constant:
        return MPoly.one(f.nvars)
    uf, ug = _univar_profile(f), _univar_profile(g)
    if uf is not None and uf == ug:
        return _univar_gcd(f, g, uf)
    if (len(f.terms) > 24 or len(g.terms) > 24) and _coprime_pretest(f, g):
        return MPoly.one(f.nvars)
    fp, gp = f.primitive(), g.primitive()
    fv = f.occurring_vars()
    gv = g.occurring_vars()
    live = sorted(fv | gv)
    if len(live) == 2:
        bits = max(
            max(abs(int(v)).bit_length() for v in fp.terms.values()),
            max(abs(int(v)).bit_length() for v in gp.terms.values()),
        )
        degs = [
            max(
                max(k[v] for k in fp.terms),
                max(k[v] for k in gp.terms),
            )
            for v in live
        ]
        if (degs[0] + 1) * (degs[1] + 1) * (bits + 8) > 250_000:
            mod = _mod_gcd_biv(fp, gp)
            if mod is not None:
                return mod
    heu = _heu_gcd(
        {k: int(v) for k, v in fp.terms.items()},
        {k: int(v) for k, v in gp.terms.items()},
    )
    if heu is not None:
        lead = max(heu)
        sign = 1 if heu[lead] > 0 else -1
        return MPoly(f.nvars, {k: Fraction(sign * v) for k, v in heu.items()})
    if len(live) == 2:
        mod = _mod_gcd_biv(fp, gp)
        if mod is not None:
            return mod
    var = max(fv | gv)
    if var not in gv:
        fu = _to_univar(f, var)
        return mpoly_gcd(_uv_content(fu), g)
    if var not in fv:
        gu = _to_univar(g, var)
        return mpoly_gcd(f, _uv_content(gu))
    fu = _to_univar(f, var)
    gu = _to_univar(g, var)
    fc = _uv_content(fu)
    gc = _uv_content(gu)
    fp = _uv_primitive(fu)
    gp = _uv_primitive(gu)
    if max(fp) < max(gp):
        fp, gp = gp, fp
    while gp:
        rem = _pseudo_rem(fp, gp)
        if rem:
            rem = _uv_primitive(rem)
        fp, gp = gp, rem
    core = _from_univar(fp, var, f.nvars)
    cont = mpoly_gcd(fc, gc)
    return (core * cont).primitive()


def mpoly_lcm(f: MPoly, g: MPoly) -> MPoly:
    if f.is_zero or g.is_zero:
        return MPoly.zero(f.nvars)
    return (f * g).divexact(mpoly_gcd(f, g)).primitive()


def squarefree_tower(poly: MPoly) -> list:
    """[s1, s2, ...] with poly = const * prod(s_k); s_k = factors of mult >= k."""
    parts = []
    w = poly.primitive()
    while not w.is_constant:
        rep = w
        for var in sorted(w.occurring_vars()):
            rep = mpoly_gcd(rep, w.derivative(var))
            if rep.is_constant:
                break
        if rep.is_constant:
            parts.append(w.primitive())
            break
        parts.append(w.divexact(rep).primitive())
        w = rep
    return parts


def perfect_power_decompose(poly: MPoly, q: int):
    """(h, c) with poly = c * h**q and h primitive, or None if impossible."""
    if poly.is_zero:
        return None
    if poly.is_constant:
        return MPoly.one(poly.nvars), poly.const_value()
    parts = squarefree_tower(poly)
    h = MPoly.one(poly.nvars)
    for j in range(q, len(parts) + 1, q):
        h = h * parts[j - 1]
    t = h ** q
    try:
        rest = poly.divexact(t)
    except ValueError:
        return None
    if not rest.is_constant:
        return None
    return h, rest.const_value()


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RatFunc:
    """Reduced fraction of multivariate polynomials over Q."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MPoly, den: MPoly, reduce: bool = True):
        if den.is_zero:
            raise ZeroDivisionError("zero denominator in rational function")
        if reduce:
            num, den = self._reduced(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def _reduced(num: MPoly, den: MPoly):
        if num.is_zero:
            return num, MPoly.one(num.nvars)
        if den.is_constant:
            c = den.const_value()
            if c != 1:
                num = num.mul_scalar(1 / c)
            return num, MPoly.one(num.nvars)
        ncont = num.signed_content()
        dcont = den.signed_content()
        nprim = MPoly(num.nvars, {k: v / ncont for k, v in num.terms.items()})
        dprim = MPoly(den.nvars, {k: v / dcont for k, v in den.terms.items()})
        g = mpoly_gcd(nprim, dprim)
        if not g.is_constant:
            nprim = nprim.divexact(g)
            dprim = dprim.divexact(g)
        ratio = ncont / dcont
        if dprim.is_constant:
            c = dprim.const_value()
            return nprim.mul_scalar(ratio / c), MPoly.one(num.nvars)
        return nprim.mul_scalar(ratio), dprim

    @classmethod
    def const(cls, nvars: int, value: Fraction) -> "RatFunc":
        return cls(MPoly.const(nvars, value), MPoly.one(nvars), reduce=False)

    @classmethod
    def from_poly(cls, poly: MPoly) -> "RatFunc":
        return cls(poly, MPoly.one(poly.nvars), reduce=False)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def const_value(self) -> Fraction:
        if not self.den.is_constant:
            raise ValueError("not a constant rational function")
        return self.num.const_value() / self.den.const_value()

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatFunc)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num.key(), self.den.key()))
        return self._hash

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r}, {self.den!r})"

    def __add__(self, other: "RatFunc") -> "RatFunc":
        # cross-cancellation: with both operands reduced, the only common
        # factor of the naive sum is inside gcd(self.den, other.den)
        if self.den.is_constant and other.den.is_constant:
            return RatFunc(self.num + other.num, self.den, reduce=False)
        g = mpoly_gcd(self.den, other.den)
        if g.is_constant:
            num = self.num * other.den + other.num * self.den
            if num.is_zero:
                return RatFunc(num, MPoly.one(num.nvars), reduce=False)
            return RatFunc(num, self.den * other.den, reduce=False)
        b1 = self.den.divexact(g)
        d1 = other.den.divexact(g)
        num = self.num * d1 + other.num * b1
        if num.is_zero:
            return RatFunc(num, MPoly.one(num.nvars), reduce=False)
        den = self.den * d1
        h = mpoly_gcd(num, g)
        if not h.is_constant:
            num = num.divexact(h)
            den = den.divexact(h)
        if den.is_constant:
            c = den.const_value()
            if c != 1:
                num = num.mul_scalar(1 / c)
            return RatFunc(num, MPoly.one(num.nvars), reduce=False)
        return RatFunc(num, den, reduce=False)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, reduce=False)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        if self.num.is_zero or other.num.is_zero:
            nv = self.num.nvars
            return RatFunc(MPoly.zero(nv), MPoly.one(nv), reduce=False)
        if self.den.is_constant and other.den.is_constant:
            return RatFunc(self.num * other.num, self.den, reduce=False)
        a_num, a_den = self.num, self.den
        b_num, b_den = other.num, other.den
        if not b_den.is_constant:
            g1 = mpoly_gcd(a_num, b_den)
            if not g1.is_constant:
                a_num = a_num.divexact(g1)
                b_den = b_den.divexact(g1)
        if not a_den.is_constant:
            g2 = mpoly_gcd(b_num, a_den)
            if not g2.is_constant:
                b_num = b_num.divexact(g2)
                a_den = a_den.divexact(g2)
        num = a_num * b_num
        den = a_den * b_den
        if den.is_constant:
            c = den.const_value()
            if c != 1:
                num = num.mul_scalar(1 / c)
            return RatFunc(num, MPoly.one(num.nvars), reduce=False)
        return RatFunc(num, den, reduce=False)

    def mul_scalar(self, value: Fraction) -> "RatFunc":
        return RatFunc(self.num.mul_scalar(value), self.den, reduce=(value == 0))

    def invert(self) -> "RatFunc":
        if self.is_zero:
            raise ZeroDivisionError("inverting zero rational function")
        if self.num.is_constant:
            c = self.num.const_value()
            return RatFunc(self.den.mul_scalar(1 / c), MPoly.one(self.num.nvars), reduce=False)
        c = self.num.signed_content()
        nprim = self.num.mul_scalar(1 / c) if c != 1 else self.num
        return RatFunc(self.den.mul_scalar(1 / c), nprim, reduce=False)

    def substitute_var(self, var: int, value: Fraction) -> "RatFunc":
        den = self.den.substitute_var(var, value)
        if den.is_zero:
            raise ZeroDivisionError("denominator vanished under substitution")
        return RatFunc(self.num.substitute_var(var, value), den)

    def pad(self, extra: int) -> "RatFunc":
        if extra == 0:
            return self
        return RatFunc(self.num.pad(extra), self.den.pad(extra), reduce=False)
