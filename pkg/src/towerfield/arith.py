"""Exact arithmetic in towers Q(transcendentals)(radicals).

A `Tower` is an ordered list of generators.  Transcendental generators span a
rational-function base field; radical generators stack on top of it in
creation order, each carrying an odd prime exponent q and a radicand drawn
from the strictly earlier part of the tower (and certified not to be a q-th
power there, which keeps every extension degree exactly q).

A `FieldElement` is kept in canonical normal form: a sparse mapping from
radical exponent vectors (componentwise < q) to reduced `RatFunc`
coefficients over the transcendental generators.  Equal elements have
bit-identical representations, so equality, hashing, and text dumps are all
exact and deterministic.

Inversion clears coefficient denominators and runs a fraction-free
pseudo-division Euclid against Y**q - radicand at the topmost radical level
that actually occurs, recursing only on the single lower-level residue; the
base case is a numerator/denominator swap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd as _int_gcd

from .errors import (
    DegenerateRadicand,
    DivisionByZero,
    DuplicateLabel,
    ReducibleRelation,
    SubstitutionSingularity,
    TowerMismatch,
)
from .polynomials import (
    MPoly,
    RatFunc,
    mpoly_gcd,
    mpoly_lcm,
    perfect_power_decompose,
    rational_qth_root,
)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = 17
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Generator:
    """One tower generator: a transcendental, or a radical y with y**q = radicand."""

    label: str
    kind: str  # "transcendental" | "radical"
    q: int | None = None
    radicand: "FieldElement | None" = None


class Tower:
    """Immutable ordered family of generators with adjunction operations."""

    __slots__ = (
        "generators",
        "trans_labels",
        "rad_labels",
        "rad_qs",
        "signature",
        "_by_label",
        "_radicand_embedded",
        "_radicand_powers",
        "_algebraic_type",
    )

    def __init__(self, generators: tuple = ()):
        self.generators = generators
        self.trans_labels = tuple(g.label for g in generators if g.kind == "transcendental")
        radicals = [g for g in generators if g.kind == "radical"]
        self.rad_labels = tuple(g.label for g in radicals)
        self.rad_qs = tuple(g.q for g in radicals)
        sig = []
        for g in generators:
            if g.kind == "transcendental":
                sig.append((g.label, "t"))
            else:
                sig.append((g.label, "r", g.q, g.radicand._content_key()))
        self.signature = tuple(sig)
        self._by_label = {g.label: g for g in generators}
        self._radicand_embedded: dict = {}
        self._radicand_powers: dict = {}
        self._algebraic_type: dict = {}

    # -- shape ----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.trans_labels)

    @property
    def rad_count(self) -> int:
        return len(self.rad_labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, Tower) and self.signature == other.signature

    def __hash__(self) -> int:
        return hash(self.signature)

    def __repr__(self) -> str:
        return f"Tower({', '.join(g.label for g in self.generators)})"

    def has_label(self, label: str) -> bool:
        return label in self._by_label

    def is_prefix_of(self, other: "Tower") -> bool:
        n = len(self.signature)
        return len(other.signature) >= n and other.signature[:n] == self.signature

    # -- adjunction ------------------------------------------------------

    def _check_label(self, label: str) -> None:
        """Labels must fit the expression grammar so dumps parse back."""
        if label in self._by_label:
            raise DuplicateLabel(f"generator label {label!r} already in tower")
        if not _LABEL.fullmatch(label):
            raise ValueError(f"generator label {label!r} is not an identifier")

    def adjoin_transcendental(self, label: str) -> "Tower":
        self._check_label(label)
        return Tower(self.generators + (Generator(label, "transcendental"),))

    def adjoin_radical(self, label: str, q: int, radicand: "FieldElement") -> "Tower":
        self._check_label(label)
        if not (_is_prime(q) and q % 2 == 1 and q >= 5):
            raise ValueError(f"radical exponent must be an odd prime >= 5, got {q}")
        if radicand.tower != self:
            raise TowerMismatch("radicand must live in the prefix tower")
        if radicand.is_zero:
            raise DegenerateRadicand(f"radicand of {label!r} is zero")
        if qth_power_test(radicand, q):
            raise ReducibleRelation(f"radicand of {label!r} is a {q}-th power")
        return Tower(self.generators + (Generator(label, "radical", q, radicand),))

    # -- elements --------------------------------------------------------

    def zero(self) -> "FieldElement":
        return FieldElement(self, {})

    def one(self) -> "FieldElement":
        return self.rational(Fraction(1))

    def rational(self, value) -> "FieldElement":
        value = Fraction(value)
        if value == 0:
            return FieldElement(self, {})
        key = (0,) * self.rad_count
        return FieldElement(self, {key: RatFunc.const(self.nvars, value)})

    def gen(self, label: str) -> "FieldElement":
        g = self._by_label.get(label)
        if g is None:
            raise KeyError(f"no generator {label!r} in tower")
        if g.kind == "transcendental":
            idx = self.trans_labels.index(label)
            key = (0,) * self.rad_count
            return FieldElement(
                self, {key: RatFunc.from_poly(MPoly.var(self.nvars, idx))}
            )
        idx = self.rad_labels.index(label)
        key = tuple(1 if i == idx else 0 for i in range(self.rad_count))
        return FieldElement(self, {key: RatFunc.const(self.nvars, Fraction(1))})

    # -- internals -------------------------------------------------------

    def _radicand_in_self(self, rad_index: int) -> "FieldElement":
        """The radicand of radical #rad_index re-embedded into this tower."""
        cached = self._radicand_embedded.get(rad_index)
        if cached is None:
            label = self.rad_labels[rad_index]
            g = self._by_label[label]
            cached = embed(g.radicand, self)
            self._radicand_embedded[rad_index] = cached
        return cached

    def _radicand_power(self, rad_index: int, exp: int) -> "FieldElement":
        key = (rad_index, exp)
        cached = self._radicand_powers.get(key)
        if cached is None:
            cached = self._radicand_in_self(rad_index) ** exp
            self._radicand_powers[key] = cached
        return cached

    def radical_is_algebraic_type(self, rad_index: int) -> bool:
        """True when the radicand chain of radical #rad_index involves no transcendental."""
        cached = self._algebraic_type.get(rad_index)
        if cached is None:
            radicand = self._radicand_in_self(rad_index)
            cached = not _mentions_transcendence(radicand)
            self._algebraic_type[rad_index] = cached
        return cached


def _mentions_transcendence(element: "FieldElement") -> bool:
    tower = element.tower
    for key, coeff in element.terms.items():
        if coeff.num.occurring_vars() or coeff.den.occurring_vars():
            return True
        for idx, exp in enumerate(key):
            if exp and not tower.radical_is_algebraic_type(idx):
                return True
    return False


class FieldElement:
    """Canonical element of a tower field."""

    __slots__ = ("tower", "terms", "_hash")

    def __init__(self, tower: Tower, terms: dict):
        self.tower = tower
        self.terms = terms
        self._hash = None

    # -- canonical identity ----------------------------------------------

    def _content_key(self) -> tuple:
        return tuple(sorted((k, c.num.key(), c.den.key()) for k, c in self.terms.items()))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldElement)
            and self.tower.signature == other.tower.signature
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._content_key())
        return self._hash

    def __repr__(self) -> str:
        return f"<FieldElement {self.text()}>"

    # -- queries ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def rational_value(self) -> Fraction | None:
        """The element as a Fraction when it is one, else None."""
        if self.is_zero:
            return Fraction(0)
        if len(self.terms) != 1:
            return None
        [(key, coeff)] = self.terms.items()
        if any(key) or not coeff.is_constant:
            return None
        return coeff.const_value()

    def is_transcendental_over_rationals(self) -> bool:
        """Structural test: the normal form involves a transcendental generator
        or a radical whose radicand chain does."""
        return _mentions_transcendence(self)

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "FieldElement") -> None:
        if self.tower.signature != other.tower.signature:
            raise TowerMismatch("elements belong to different towers")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            cur = out.get(key)
            s = coeff if cur is None else cur + coeff
            if s.is_zero:
                out.pop(key, None)
            else:
                out[key] = s
        return FieldElement(self.tower, out)

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.tower, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        tower = self.tower
        acc: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ka, kb))
                _accumulate_reduced(tower, acc, key, ca * cb)
        return FieldElement(tower, {k: c for k, c in acc.items() if not c.is_zero})

    def __pow__(self, exp: int) -> "FieldElement":
        if exp < 0:
            return self.invert() ** (-exp)
        result = self.tower.one()
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.invert()

    def invert(self) -> "FieldElement":
        if self.is_zero:
            raise DivisionByZero("inverting the zero element")
        return _invert_any(self)

    # -- text form ---------------------------------------------------------

    def text(self) -> str:
        """Canonical expression string over generator labels."""
        return element_to_text(self)


def _accumulate_reduced(tower: Tower, acc: dict, key: tuple, coeff: RatFunc) -> None:
    """Add coeff * y**key into acc, folding exponent overflow through relations."""
    if coeff.is_zero:
        return
    over = None
    for idx in range(len(key) - 1, -1, -1):
        if key[idx] >= tower.rad_qs[idx]:
            over = idx
            break
    if over is None:
        cur = acc.get(key)
        s = coeff if cur is None else cur + coeff
        if s.is_zero:
            acc.pop(key, None)
        else:
            acc[key] = s
        return
    q = tower.rad_qs[over]
    d, r = divmod(key[over], q)
    base = tower._radicand_power(over, d)
    reduced = key[:over] + (r,) + key[over + 1 :]
    for bk, bc in base.terms.items():
        nk = tuple(x + y for x, y in zip(reduced, bk))
        _accumulate_reduced(tower, acc, nk, coeff * bc)


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------


def _level_of(element: FieldElement, level: int) -> int:
    """Highest radical index < level actually used, plus one (0 for none)."""
    top = 0
    for key in element.terms:
        for idx in range(level - 1, -1, -1):
            if key[idx]:
                if idx + 1 > top:
                    top = idx + 1
                break
    return top


def _poly_coeffs(element: FieldElement, rad_index: int) -> dict:
    """View as polynomial in radical #rad_index: degree -> element with that slot zeroed."""
    out: dict = {}
    for key, coeff in element.terms.items():
        deg = key[rad_index]
        nk = key[:rad_index] + (0,) + key[rad_index + 1 :]
        part = out.setdefault(deg, {})
        cur = part.get(nk)
        s = coeff if cur is None else cur + coeff
        if s.is_zero:
            part.pop(nk, None)
        else:
            part[nk] = s
    tower = element.tower
    return {d: FieldElement(tower, t) for d, t in out.items() if t}

def _shift_radical(element: FieldElement, rad_index: int, exp: int) -> FieldElement:
    if exp == 0 or element.is_zero:
        return element
    out = {}
    for key, coeff in element.terms.items():
        nk = key[:rad_index] + (key[rad_index] + exp,) + key[rad_index + 1 :]
        out[nk] = coeff
    return FieldElement(element.tower, out)


def _clear_denominators(element: FieldElement):
    """(P, d) with element = P/d, P denominator-free, d a base polynomial."""
    tower = element.tower
    d = MPoly.one(tower.nvars)
    for coeff in element.terms.values():
        d = mpoly_lcm(d, coeff.den)
    if d.is_constant:
        return element, d
    one = MPoly.one(tower.nvars)
    terms = {}
    for key, coeff in element.terms.items():
        mult = d if coeff.den.is_constant else d.divexact(coeff.den)
        terms[key] = RatFunc(coeff.num * mult, one, reduce=False)
    return FieldElement(tower, terms), d


def _strip_joint(polys: tuple) -> tuple:
    """Divide every coefficient in the given radical-degree dicts by their
    joint content (polynomial and rational), preserving their mutual ratios."""
    nums = [
        rf.num
        for poly in polys
        for el in poly.values()
        for rf in el.terms.values()
    ]
    cont_poly = None
    num_g = 0
    den_l = 1
    for num in sorted(nums, key=lambda n: len(n.terms)):
        if cont_poly is None or not cont_poly.is_constant:
            cont_poly = num if cont_poly is None else mpoly_gcd(cont_poly, num)
        for v in num.terms.values():
            num_g = _int_gcd(num_g, v.numerator)
            den_l = den_l * v.denominator // _int_gcd(den_l, v.denominator)
    scale = Fraction(num_g, den_l)
    if cont_poly is None or (cont_poly.is_constant and scale in (0, 1)):
        return polys
    strip_poly = not cont_poly.is_constant
    out = []
    for poly in polys:
        npoly = {}
        for d, el in poly.items():
            one = MPoly.one(el.tower.nvars)
            terms = {}
            for key, rf in el.terms.items():
                num = rf.num.divexact(cont_poly) if strip_poly else rf.num
                if scale not in (0, 1):
                    num = num.mul_scalar(1 / scale)
                terms[key] = RatFunc(num, one, reduce=False)
            npoly[d] = FieldElement(el.tower, terms)
        out.append(npoly)
    return tuple(out)


def _invert_cleared(element: FieldElement) -> FieldElement:
    """Inverse of a denominator-free element via pseudo-division Euclid.

    At the topmost radical level in use, runs a fraction-free remainder
    sequence against Y**q - radicand: no coefficient is inverted inside the
    loop, and each step strips the joint content of the remainder/cofactor
    pair to keep growth in check.  The terminal degree-0 residue is the only
    value inverted recursively, one radical level down.
    """
    tower = element.tower
    top = _level_of(element, tower.rad_count)
    if top == 0:
        key = (0,) * tower.rad_count
        return FieldElement(tower, {key: element.terms[key].invert()})
    k = top - 1

    radicand = tower._radicand_in_self(k)
    rad_num, rad_den = _clear_denominators(radicand)
    zero_key = (0,) * tower.rad_count
    den_el = FieldElement(tower, {zero_key: RatFunc.from_poly(rad_den)})
    r0 = {tower.rad_qs[k]: den_el, 0: -rad_num}
    a0: dict = {}
    r1 = _poly_coeffs(element, k)
    a1: dict = {0: tower.one()}

    def degree(poly: dict) -> int:
        return max(poly) if poly else -1

    while degree(r1) > 0:
        d1 = degree(r1)
        lc1 = r1[d1]
        rem, arm = r0, a0
        while degree(rem) >= d1:
            dr = degree(rem)
            rem = dict(rem)
            lcr = rem.pop(dr)
            # (rem, arm) <- lc1*(rem, arm) - lcr*Y**(dr-d1)*(r1, a1)
            nrem, narm = {}, {}
            for d, c in rem.items():
                nrem[d] = c * lc1
            for d, c in arm.items():
                narm[d] = c * lc1
            for d, c in r1.items():
                if d == d1:
                    continue
                nd = d + dr - d1
                cur = nrem.get(nd)
                prod = lcr * c
                s = -prod if cur is None else cur - prod
                if s.is_zero:
                    nrem.pop(nd, None)
                else:
                    nrem[nd] = s
            for d, c in a1.items():
                nd = d + dr - d1
                cur = narm.get(nd)
                prod = lcr * c
                s = -prod if cur is None else cur - prod
                if s.is_zero:
                    narm.pop(nd, None)
                else:
                    narm[nd] = s
            rem, arm = nrem, narm
        rem, arm = _strip_joint((rem, arm))
        r0, a0, r1, a1 = r1, a1, rem, arm
    if 0 not in r1:
        raise DivisionByZero("inverse does not exist; tower relation degenerate")
    residue, residue_den = _clear_denominators(r1[0])
    unit_inv = _invert_cleared(residue)
    if not residue_den.is_constant:
        unit_inv = unit_inv * FieldElement(
            tower, {zero_key: RatFunc.from_poly(residue_den)}
        )
    cofactor = tower.zero()
    for d, c in a1.items():
        cofactor = cofactor + _shift_radical(c, k, d)
    return cofactor * unit_inv


def _invert_any(element: FieldElement) -> FieldElement:
    """Inverse of a nonzero element at whatever radical level it lives."""
    cleared, den = _clear_denominators(element)
    inv = _invert_cleared(cleared)
    if den.is_constant:
        return inv
    key = (0,) * element.tower.rad_count
    return inv * FieldElement(element.tower, {key: RatFunc.from_poly(den)})


# ---------------------------------------------------------------------------
# tower-level operations
# ---------------------------------------------------------------------------


def embed(element: FieldElement, target: Tower) -> FieldElement:
    """Re-embed an element of a prefix tower; the normal form is unchanged."""
    if element.tower == target:
        return element
    if not element.tower.is_prefix_of(target):
        raise TowerMismatch("embedding target does not extend the element's tower")
    extra_vars = target.nvars - element.tower.nvars
    extra_rads = target.rad_count - element.tower.rad_count
    tail = (0,) * extra_rads
    terms = {k + tail: c.pad(extra_vars) for k, c in element.terms.items()}
    return FieldElement(target, terms)


def qth_power_test(element: FieldElement, q: int) -> bool:
    """Certify that an element is a q-th power in its tower.

    Implemented by exponent-divisibility of the squarefree factorization of
    numerator and denominator over the transcendental part plus exact rational
    q-th-root extraction on the constant factor.  For elements whose normal
    form involves radical generators the check conservatively answers False;
    the radicands this package constructs (1 - x**q and rational
    specializations of it) never take that shape.
    """
    if element.is_zero:
        raise DegenerateRadicand("q-th-power test on zero")
    if any(any(key) for key in element.terms):
        return False
    key = (0,) * element.tower.rad_count
    coeff = element.terms[key]
    num_dec = perfect_power_decompose(coeff.num.primitive(), q)
    if num_dec is None:
        return False
    den_dec = perfect_power_decompose(coeff.den.primitive(), q)
    if den_dec is None:
        return False
    ratio = (
        coeff.num.signed_content()
        * num_dec[1]
        / (coeff.den.signed_content() * den_dec[1])
    )
    return rational_qth_root(ratio, q) is not None


def substituted_tower(tower: Tower, label: str, value: Fraction) -> Tower:
    """Rebuild a tower with one transcendental replaced by a rational value.

    Radicands mentioning the substituted generator are rewritten; a radicand
    that collapses to zero raises DegenerateRadicand and one that becomes a
    q-th power raises ReducibleRelation.
    """
    if label not in tower.trans_labels:
        raise KeyError(f"{label!r} is not a transcendental generator")
    target = Tower()
    for g in tower.generators:
        if g.label == label:
            continue
        if g.kind == "transcendental":
            target = target.adjoin_transcendental(g.label)
        else:
            radicand = substitute(g.radicand, label, value, target)
            target = target.adjoin_radical(g.label, g.q, radicand)
    return target


def substitute(
    element: FieldElement, label: str, value: Fraction, target: Tower
) -> FieldElement:
    """Apply one transcendental -> rational assignment, landing in `target`.

    `target` must be the substituted image of the element's tower (or of a
    prefix of it, for radicand rewrites).  Raises SubstitutionSingularity when
    a denominator vanishes under the assignment.
    """
    source = element.tower
    if label not in source.trans_labels:
        # The assignment does not touch this prefix, but radicands below may
        # have been rewritten, so transport the (formally identical) terms
        # onto the target tower instead of embedding.
        if target.nvars != source.nvars or target.rad_count != source.rad_count:
            raise TowerMismatch("substitution target does not match the source shape")
        return FieldElement(target, dict(element.terms))
    var = source.trans_labels.index(label)
    out: dict = {}
    for key, coeff in element.terms.items():
        try:
            nc = coeff.substitute_var(var, value)
        except ZeroDivisionError as exc:
            raise SubstitutionSingularity(
                f"denominator vanished substituting {label} = {value}"
            ) from exc
        if not nc.is_zero:
            out[key] = nc
    return FieldElement(target, out)


def arithmetic(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Named entry point for the three ring operations."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def normal_form(tower: Tower, num_terms: dict, den_terms: dict | None = None) -> FieldElement:
    """Normalize a raw polynomial fraction over the tower's generators.

    Raw terms map exponent tuples (one slot per generator, creation order,
    radical exponents unreduced) to rational coefficients.  The result is the
    canonical field element; a zero denominator raises DivisionByZero.
    """
    num = _raw_to_element(tower, num_terms)
    if den_terms is None:
        return num
    den = _raw_to_element(tower, den_terms)
    if den.is_zero:
        raise DivisionByZero("zero denominator in raw expression")
    return num / den


def _raw_to_element(tower: Tower, raw: dict) -> FieldElement:
    positions = []  # per generator: ("t", var) or ("r", rad_index)
    t_seen = r_seen = 0
    for g in tower.generators:
        if g.kind == "transcendental":
            positions.append(("t", t_seen))
            t_seen += 1
        else:
            positions.append(("r", r_seen))
            r_seen += 1
    acc: dict = {}
    for key, coeff in raw.items():
        coeff = Fraction(coeff)
        if coeff == 0:
            continue
        if len(key) != len(tower.generators):
            raise ValueError("raw exponent tuple length does not match tower")
        tkey = [0] * tower.nvars
        rkey = [0] * tower.rad_count
        for exp, (kind, pos) in zip(key, positions):
            if kind == "t":
                tkey[pos] = exp
            else:
                rkey[pos] = exp
        mono = RatFunc.from_poly(MPoly(tower.nvars, {tuple(tkey): coeff}))
        _accumulate_reduced(tower, acc, tuple(rkey), mono)
    return FieldElement(tower, {k: c for k, c in acc.items() if not c.is_zero})


# ---------------------------------------------------------------------------
# canonical text form
# ---------------------------------------------------------------------------


def element_to_text(element: FieldElement) -> str:
    """Deterministic expression string: `(numerator)/(denominator)`.

    The numerator is a sum over monomials in all generator labels with
    rational coefficients; the denominator involves transcendental generators
    only and is omitted when it equals 1.  Monomials are printed in descending
    lexicographic order of their full exponent vectors (creation order).
    """
    tower = element.tower
    if element.is_zero:
        return "0"
    den = MPoly.one(tower.nvars)
    for coeff in element.terms.values():
        den = mpoly_lcm(den, coeff.den)
    flat: dict = {}
    for rkey, coeff in element.terms.items():
        scaled = coeff.num * den.divexact(coeff.den)
        for tkey, val in scaled.terms.items():
            full = _merge_key(tower, tkey, rkey)
            flat[full] = flat.get(full, Fraction(0)) + val
    num_text = _poly_text(tower, flat)
    if den.is_constant and den.const_value() == 1:
        return num_text
    den_flat = {
        _merge_key(tower, tkey, (0,) * tower.rad_count): val
        for tkey, val in den.terms.items()
    }
    return f"({num_text})/({_poly_text(tower, den_flat)})"


def _merge_key(tower: Tower, tkey: tuple, rkey: tuple) -> tuple:
    out = []
    t_seen = r_seen = 0
    for g in tower.generators:
        if g.kind == "transcendental":
            out.append(tkey[t_seen])
            t_seen += 1
        else:
            out.append(rkey[r_seen])
            r_seen += 1
    return tuple(out)


def _poly_text(tower: Tower, flat: dict) -> str:
    labels = [g.label for g in tower.generators]
    parts = []
    for key in sorted((k for k, v in flat.items() if v != 0), reverse=True):
        val = flat[key]
        factors = []
        for label, exp in zip(labels, key):
            if exp == 1:
                factors.append(label)
            elif exp > 1:
                factors.append(f"{label}^{exp}")
        if not factors:
            parts.append(str(val))
        elif val == 1:
            parts.append("*".join(factors))
        elif val == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append(str(val) + "*" + "*".join(factors))
    if not parts:
        return "0"
    text = parts[0]
    for part in parts[1:]:
        text += part if part.startswith("-") else "+" + part
    return text


# ---------------------------------------------------------------------------
# text parsing (inverse of element_to_text)
# ---------------------------------------------------------------------------

import re as _re

_TOKEN = _re.compile(r"\d+|[A-Za-z][A-Za-z0-9_]*|[()+\-*/^]")
_LABEL = _re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def text_to_element(tower: Tower, text: str) -> FieldElement:
    """Parse a canonical expression string back into a field element."""
    text = text.strip()
    if text == "0":
        return tower.zero()
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != text.replace(" ", ""):
        raise ValueError(f"cannot tokenize element text {text!r}")
    if text.startswith("(") :
        num_toks, rest = _split_paren(tokens)
        if not rest or rest[0] != "/":
            raise ValueError(f"expected /(...) after parenthesized numerator in {text!r}")
        den_toks, tail = _split_paren(rest[1:])
        if tail:
            raise ValueError(f"trailing tokens in element text {text!r}")
        return normal_form(
            tower, _parse_poly(tower, num_toks), _parse_poly(tower, den_toks)
        )
    return normal_form(tower, _parse_poly(tower, tokens))


def _split_paren(tokens):
    if not tokens or tokens[0] != "(":
        raise ValueError("expected '('")
    depth = 0
    for i, tok in enumerate(tokens):
        if tok == "(":
            depth += 1
        elif tok == ")":
            depth -= 1
            if depth == 0:
                return tokens[1:i], tokens[i + 1 :]
    raise ValueError("unbalanced parentheses")


def _parse_poly(tower: Tower, tokens) -> dict:
    labels = [g.label for g in tower.generators]
    index = {lab: i for i, lab in enumerate(labels)}
    raw: dict = {}
    pos = 0
    n = len(tokens)
    sign = 1
    if pos < n and tokens[pos] in "+-":
        sign = -1 if tokens[pos] == "-" else 1
        pos += 1
    while pos < n:
        coeff = Fraction(sign)
        exps = [0] * len(labels)
        expect_factor = True
        while pos < n and (expect_factor or (tokens[pos] == "*")):
            if tokens[pos] == "*":
                pos += 1
                expect_factor = True
                continue
            tok = tokens[pos]
            if tok.isdigit():
                value = Fraction(int(tok))
                pos += 1
                if pos < n and tokens[pos] == "/" and pos + 1 < n and tokens[pos + 1].isdigit():
                    value = value / int(tokens[pos + 1])
                    pos += 2
                coeff *= value
            elif tok[0].isalpha():
                if tok not in index:
                    raise ValueError(f"unknown generator {tok!r} in element text")
                exp = 1
                pos += 1
                if pos < n and tokens[pos] == "^":
                    if pos + 1 >= n or not tokens[pos + 1].isdigit():
                        raise ValueError("malformed exponent")
                    exp = int(tokens[pos + 1])
                    pos += 2
                exps[index[tok]] += exp
            else:
                raise ValueError(f"unexpected token {tok!r} in element text")
            expect_factor = False
        key = tuple(exps)
        raw[key] = raw.get(key, Fraction(0)) + coeff
        if pos >= n:
            break
        if tokens[pos] not in "+-":
            raise ValueError(f"unexpected token {tokens[pos]!r} between terms")
        sign = -1 if tokens[pos] == "-" else 1
        pos += 1
    return raw
