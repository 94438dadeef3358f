"""Oracle computations over presentations: transcendence tests, annihilator
searches, basis enumeration, and the schedule-recovery reductions.

The structural transcendence test reads the normal form of an element — it is
algebraic over the rationals exactly when no transcendental generator occurs
in it, directly or through a radical's radicand chain.  The bounded searches
are finite surrogates for the unbounded procedures they stand in for: every
exhausted bound surfaces as :data:`INCONCLUSIVE`, which deliberately refuses
to act as a boolean so it can never be mistaken for a verdict.

Witness polynomials are canonical tuples of ``(exponents, coefficient)``
pairs in descending degree-lexicographic order, with integer coefficients,
primitive content, and positive leading coefficient.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .curves import curve_poly
from .errors import UnknownLabel
from .presentation import Presentation
from .schedules import EnumerationSchedule, PhiTable, true_stability

__all__ = [
    "INCONCLUSIVE",
    "STRUCTURAL",
    "BOUNDED_SEARCH",
    "TranscendenceOracle",
    "IndependenceQuery",
    "BasisEnumeration",
    "MembershipDecision",
    "ground_truth_T",
    "annihilator_search",
    "witness_value",
    "witness_height",
    "witness_degree",
    "witness_to_text",
    "decide_independence",
    "membership_via_basis",
    "c_from_t",
    "basis_from_c",
    "d_from_t",
    "basis_from_d",
]

STRUCTURAL = "structural"
BOUNDED_SEARCH = "bounded-search"


class _InconclusiveType:
    """Unique marker for an exhausted bounded search."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "Inconclusive"

    def __bool__(self) -> bool:
        raise TypeError("Inconclusive is not a verdict; test with 'is INCONCLUSIVE'")


INCONCLUSIVE = _InconclusiveType()


# ---------------------------------------------------------------------------
# transcendence oracles
# ---------------------------------------------------------------------------


def ground_truth_T(p: Presentation, idx: int) -> bool:
    """True iff the element at ``idx`` is transcendental over the rationals.

    Reads the structural criterion off the normal form; constant-time
    relative to the element size and never inconclusive.
    """
    if not 0 <= idx < p.domain_size:
        raise ValueError(f"index {idx} outside domain of size {p.domain_size}")
    if idx not in p.interpretation:
        raise ValueError(f"index {idx} carries no interpretation")
    return p.interpretation[idx].is_transcendental_over_rationals()


@dataclass(frozen=True)
class TranscendenceOracle:
    """A way of answering "is this element transcendental?".

    The structural source reads the ground truth off the tower normal form
    and always answers.  The bounded-search source runs an annihilator
    search: a witness proves the element algebraic, while exhausted bounds
    answer :data:`INCONCLUSIVE` — a search can refute transcendence but
    never confirm it.
    """

    source: str = STRUCTURAL
    degree_bound: int = 8
    height_bound: int = 64

    def __post_init__(self) -> None:
        if self.source not in (STRUCTURAL, BOUNDED_SEARCH):
            raise ValueError(f"unknown oracle source {self.source!r}")
        if self.degree_bound < 1 or self.height_bound < 1:
            raise ValueError("search bounds must be >= 1")

    def query(self, p: Presentation, idx: int):
        if self.source == STRUCTURAL:
            return ground_truth_T(p, idx)
        witness = annihilator_search(p, (idx,), self.degree_bound, self.height_bound)
        return False if witness is not None else INCONCLUSIVE


# ---------------------------------------------------------------------------
# annihilator search
# ---------------------------------------------------------------------------


def _monomials(nvars: int, degree_bound: int) -> list:
    """Exponent tuples with total degree <= bound, ascending (degree, lex)."""
    grid: list = [[] for _ in range(degree_bound + 1)]
    grid[0] = [()]
    for _var in range(nvars):
        new_grid: list = [[] for _ in range(degree_bound + 1)]
        for total in range(degree_bound + 1):
            for stem in grid[total]:
                for e in range(degree_bound - total + 1):
                    new_grid[total + e].append(stem + (e,))
        grid = new_grid
    out = []
    for total in range(degree_bound + 1):
        out.extend(sorted(grid[total]))
    return out


def _coordinates(element) -> dict:
    """Sparse rational coordinates of an element: (radical key, monomial) -> Q.

    Monomials of generators never involve inversion, so every coefficient in
    the normal form is polynomial; a non-constant denominator means the
    caller fed an element outside the search's domain.
    """
    out = {}
    for radkey, rf in element.terms.items():
        if not rf.den.is_constant:
            raise ValueError("annihilator search needs polynomial coordinates")
        for exps, coeff in rf.num.terms.items():
            out[(radkey, exps)] = coeff
    return out


def _axpy(target: dict, source: dict, factor: Fraction) -> None:
    for key, value in source.items():
        updated = target.get(key, Fraction(0)) + factor * value
        if updated:
            target[key] = updated
        else:
            target.pop(key, None)


def _canonical_witness(combo: dict, monomials: list):
    """Scale a rational dependency to a primitive integer witness tuple."""
    terms = {monomials[pos]: coeff for pos, coeff in combo.items() if coeff}
    denominator = 1
    for coeff in terms.values():
        denominator = denominator * coeff.denominator // gcd(denominator, coeff.denominator)
    scaled = {exps: int(c * denominator) for exps, c in terms.items()}
    common = 0
    for value in scaled.values():
        common = gcd(common, abs(value))
    ordered = sorted(scaled, key=lambda e: (sum(e), e), reverse=True)
    if scaled[ordered[0]] < 0:
        common = -common
    return tuple((exps, scaled[exps] // common) for exps in ordered)


def witness_value(p: Presentation, indices: tuple, witness: tuple):
    """Evaluate a witness polynomial at the tuple's elements."""
    values = [p.interpretation[i] for i in indices]
    total = p.tower.zero()
    for exps, coeff in witness:
        term = p.tower.rational(Fraction(coeff))
        for value, e in zip(values, exps):
            if e:
                term = term * value ** e
        total = total + term
    return total


def witness_height(witness: tuple) -> int:
    return max(abs(coeff) for _, coeff in witness)


def witness_degree(witness: tuple) -> int:
    return max(sum(exps) for exps, _ in witness)


def annihilator_search(
    p: Presentation, indices: tuple, degree_bound: int, height_bound: int
):
    """Least-degree integer polynomial annihilating the tuple, or None.

    Scans monomials in ascending degree-lexicographic order, maintaining a
    reduced basis of their coordinate vectors; the first monomial linearly
    dependent on its predecessors yields the witness, which is scaled
    primitive, sign-normalized, and verified by direct evaluation before
    being returned.  A dependency whose scaled height exceeds the bound is
    skipped and the scan continues, so tight height bounds shrink what is
    findable rather than corrupting it.
    """
    if not indices:
        raise ValueError("annihilator search needs a nonempty tuple")
    if degree_bound < 1 or height_bound < 1:
        raise ValueError("search bounds must be >= 1")
    for idx in indices:
        if not 0 <= idx < p.domain_size or idx not in p.interpretation:
            raise ValueError(f"index {idx} has no interpreted element")

    values = [p.interpretation[i] for i in indices]
    powers = [{0: p.tower.one()} for _ in values]

    def power(var: int, exp: int):
        cache = powers[var]
        if exp not in cache:
            cache[exp] = power(var, exp - 1) * values[var]
        return cache[exp]

    monomials = _monomials(len(indices), degree_bound)
    pivots: dict = {}  # coord -> (row, combo), pivot coeff normalized to 1
    for pos, exps in enumerate(monomials):
        element = p.tower.one()
        for var, e in enumerate(exps):
            if e:
                element = element * power(var, e)
        row = _coordinates(element)
        combo = {pos: Fraction(1)}
        # Reduce against the pivots to a fixpoint.  Eliminating a coordinate
        # only introduces coordinates strictly below the pivot's, so the
        # worklist descends and terminates; re-queuing covers coordinates a
        # pivot row re-introduces after an earlier elimination.
        work = list(row)
        while work:
            coord = work.pop()
            factor = row.get(coord)
            if not factor:
                continue
            hit = pivots.get(coord)
            if hit is None:
                continue
            prow, pcombo = hit
            before = set(row)
            _axpy(row, prow, -factor)
            _axpy(combo, pcombo, -factor)
            work.extend(k for k in row if k not in before)
        if not row:
            witness = _canonical_witness(combo, monomials)
            if witness_height(witness) > height_bound:
                continue
            assert witness_value(p, indices, witness).is_zero, "witness must annihilate"
            return witness
        coord = max(row)
        scale = row[coord]
        row = {k: v / scale for k, v in row.items()}
        combo = {k: v / scale for k, v in combo.items()}
        pivots[coord] = (row, combo)
    return None


def _default_names(count: int) -> tuple:
    if count == 1:
        return ("X",)
    if count == 2:
        return ("X", "Y")
    return ("X",) + tuple(f"Y{i}" for i in range(count - 1))


def witness_to_text(witness: tuple, names=None) -> str:
    """Canonical text form: monomials in descending degree-lex order."""
    if names is None:
        names = _default_names(len(witness[0][0]))
    pieces = []
    for exps, coeff in witness:
        factors = []
        for name, e in zip(names, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        magnitude = abs(coeff)
        if not factors:
            body = str(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(magnitude)] + factors)
        sign = "-" if coeff < 0 else "+"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    text = f"-{first_body}" if first_sign == "-" else first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


# ---------------------------------------------------------------------------
# independence and basis membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndependenceQuery:
    """A bounded algebraic-independence question about a tuple of indices."""

    indices: tuple
    degree_bound: int = 6
    height_bound: int = 64

    def __post_init__(self) -> None:
        if not self.indices:
            raise ValueError("independence queries need a nonempty tuple")
        if self.degree_bound < 1 or self.height_bound < 1:
            raise ValueError("search bounds must be >= 1")


def decide_independence(p: Presentation, query: IndependenceQuery) -> bool:
    """False when an annihilator exists within bounds (conclusively
    dependent); True when none was found — independent as far as the bounds
    can see, which for genuinely independent tuples is the truth."""
    witness = annihilator_search(
        p, query.indices, query.degree_bound, query.height_bound
    )
    return witness is None


@dataclass(frozen=True)
class BasisEnumeration:
    """Ordered emission of basis indices with per-index justifications."""

    emitted: tuple
    provenance: tuple

    def __post_init__(self) -> None:
        if len(set(self.emitted)) != len(self.emitted):
            raise ValueError("emitted basis indices must be pairwise distinct")
        if len(self.provenance) != len(self.emitted):
            raise ValueError("each emitted index needs a provenance record")


@dataclass(frozen=True)
class MembershipDecision:
    """Outcome of the basis-membership search, with its annihilator."""

    member: bool
    prefix_length: int
    witness: tuple


def membership_via_basis(
    p: Presentation, basis: BasisEnumeration, idx: int, bounds: tuple
):
    """Decide whether ``idx`` sits in the enumerated basis.

    Walks growing prefixes of the basis, searching for an annihilator of
    ``(x, b0, ..., bn)``; once one is found, ``x`` is a member exactly when
    it equals one of the prefix elements.  The decision carries the witness
    and the prefix length used.  Returns :data:`INCONCLUSIVE` when every
    prefix exhausts the bounds without an annihilator.
    """
    degree_bound, height_bound = bounds
    for n in range(len(basis.emitted)):
        prefix = basis.emitted[: n + 1]
        witness = annihilator_search(
            p, (idx,) + prefix, degree_bound, height_bound
        )
        if witness is not None:
            return MembershipDecision(
                member=idx in prefix, prefix_length=n + 1, witness=witness
            )
    return INCONCLUSIVE


# ---------------------------------------------------------------------------
# schedule recovery and basis enumeration for the staged builds
# ---------------------------------------------------------------------------


def _pair_order(n: int):
    """All ordered index pairs, blocked by their maximum."""
    for m in range(n):
        for a in range(m + 1):
            yield (a, m)
        for b in range(m - 1, -1, -1):
            yield (m, b)


_PROBE_PRIME = 2199023255867  # safe prime 2*1099511627933 + 1
_PROBE_POINT = 1234567891


class _ProbeFailure(Exception):
    """A tower admits no image at the probe point (zero denominator)."""


def _poly_probe(poly, point: tuple, modulus: int) -> int:
    total = 0
    for exps, coeff in poly.terms.items():
        den = coeff.denominator % modulus
        if den == 0:
            raise _ProbeFailure("coefficient denominator vanishes at the probe")
        v = coeff.numerator % modulus * pow(den, modulus - 2, modulus) % modulus
        for base, e in zip(point, exps):
            if e:
                v = v * pow(base, e, modulus) % modulus
        total = (total + v) % modulus
    return total


class _Probe:
    """Deterministic homomorphism of a tower into residues mod a safe prime.

    The modulus ``P`` has ``P - 1 = 2 * 1099511627933`` with an odd cofactor
    prime and distinct from every radical exponent in use, so raising to any
    such exponent permutes the residues and each radical generator has a
    unique consistent image (the inverse-exponent power of its radicand's
    image).  Transcendental generators map to fixed pseudo-spread residues.
    The map respects sums and products exactly, so an identity failing at
    the probe point is conclusively false; only identities surviving the
    probe need the exact arithmetic.
    """

    __slots__ = ("values",)

    def __init__(self, tower):
        modulus = _PROBE_PRIME
        self.values: dict = {}
        for pos, gen in enumerate(tower.generators):
            if gen.kind == "transcendental":
                self.values[gen.label] = pow(_PROBE_POINT, pos + 1, modulus)
            else:
                radicand = self.element(gen.radicand)
                exponent = pow(gen.q, -1, modulus - 1)
                self.values[gen.label] = pow(radicand, exponent, modulus)

    def element(self, e) -> int:
        modulus = _PROBE_PRIME
        trans = tuple(self.values[label] for label in e.tower.trans_labels)
        roots = tuple(self.values[label] for label in e.tower.rad_labels)
        total = 0
        for key, coeff in e.terms.items():
            num = _poly_probe(coeff.num, trans, modulus)
            den = _poly_probe(coeff.den, trans, modulus)
            if den == 0:
                raise _ProbeFailure("coefficient denominator vanishes at the probe")
            v = num * pow(den, modulus - 2, modulus) % modulus
            for root, exp in zip(roots, key):
                if exp:
                    v = v * pow(root, exp, modulus) % modulus
            total = (total + v) % modulus
        return total


def _curve_scanner(p: Presentation, i: int):
    """Per-pair zero test for curve ``i``, sharing each element's power.

    The defining polynomial splits into per-coordinate contributions, so
    each domain element's power enters every pair test by a single addition.
    A modular probe image screens each pair first; only pairs solving the
    curve modulo the probe prime — actual solutions plus vanishingly rare
    collisions — pay for an exact power, whose verdict is final either way.
    """
    q = curve_poly(i, p.policy).q
    one = p.tower.one()
    powers: dict = {}

    def exact(a: int, b: int) -> bool:
        if a not in powers:
            powers[a] = p.interpretation[a] ** q
        if b not in powers:
            powers[b] = p.interpretation[b] ** q
        return (powers[a] + powers[b] - one).is_zero

    try:
        probe = _Probe(p.tower)
    except (_ProbeFailure, ValueError):
        return exact

    modulus = _PROBE_PRIME
    images: dict = {}

    def solves(a: int, b: int) -> bool:
        for idx in (a, b):
            if idx not in images:
                try:
                    images[idx] = pow(probe.element(p.interpretation[idx]), q, modulus)
                except _ProbeFailure:
                    images[idx] = None
        if images[a] is not None and images[b] is not None:
            if (images[a] + images[b] - 1) % modulus:
                return False
        return exact(a, b)

    return solves


def c_from_t(p: Presentation, oracle: TranscendenceOracle, i: int) -> bool:
    """Recover membership of ``i`` in the rationalization schedule.

    Scans domain pairs in blocked order for a solution of curve ``i`` with
    both coordinates nonzero and a transcendental first coordinate; finding
    one certifies ``i`` outside the schedule, so the return value is the
    negation.  The scan is bounded by the dumped domain: a True answer
    means no witness within this horizon.
    """
    solves = _curve_scanner(p, i)
    verdicts: dict = {}
    for a, b in _pair_order(p.domain_size):
        x = p.interpretation.get(a)
        y = p.interpretation.get(b)
        if x is None or y is None or x.is_zero or y.is_zero:
            continue
        if not solves(a, b):
            continue
        if a not in verdicts:
            verdicts[a] = oracle.query(p, a)
        if verdicts[a] is True:
            return False
    return True


_PLAIN_LABEL = re.compile(r"x(\d+)$")
_GENERATION_LABEL = re.compile(r"x(\d+)_(\d+)$")


def basis_from_c(p: Presentation, members: EnumerationSchedule) -> BasisEnumeration:
    """Enumerate the basis of a singleton-style build from its schedule.

    For each unscheduled slot, emits the first coordinate of the first
    domain pair solving that slot's curve with both coordinates nonzero;
    later solutions of the same curve are interalgebraic with it and are
    ignored.
    """
    slots = sorted(
        int(m.group(1)) for m in map(_PLAIN_LABEL.fullmatch, p.ledger) if m
    )
    emitted, provenance = [], []
    for slot in slots:
        if slot in members.members():
            continue
        solves = _curve_scanner(p, slot)
        for a, b in _pair_order(p.domain_size):
            x = p.interpretation.get(a)
            y = p.interpretation.get(b)
            if x is None or y is None or x.is_zero or y.is_zero:
                continue
            if solves(a, b):
                emitted.append(a)
                provenance.append(("curve", slot, a, b))
                break
    return BasisEnumeration(tuple(emitted), tuple(provenance))


def d_from_t(p: Presentation, oracle: TranscendenceOracle, j: int):
    """Recover membership of ``j`` in the replacement schedule.

    Queries the oracle on the original pair label for odd slot ``2j + 1``;
    a swallowed original is algebraic, so the answer is the negation of its
    transcendence.  An inconclusive oracle answer is passed through.
    """
    label = f"x{2 * j + 1}"
    if label not in p.ledger:
        raise UnknownLabel(f"no original generator {label!r} in the ledger")
    verdict = oracle.query(p, p.ledger[label])
    if verdict is INCONCLUSIVE:
        return INCONCLUSIVE
    return not verdict


def basis_from_d(
    p: Presentation, replacements: EnumerationSchedule, phi: PhiTable
) -> BasisEnumeration:
    """Enumerate the basis of a retire-unless-stable build.

    Odd slots contribute their original label unless the slot's index is in
    the replacement schedule, in which case the primed label is emitted once
    it exists.  An even slot contributes only when some convergence row is
    stable through the schedule's horizon: the emitted generation is the
    incumbent at the stage after that row — the largest spawn suffix not
    exceeding it.
    """
    generations: dict = {}
    plain: list = []
    for label in p.ledger:
        m = _GENERATION_LABEL.fullmatch(label)
        if m:
            generations.setdefault(int(m.group(1)), []).append(int(m.group(2)))
            continue
        m = _PLAIN_LABEL.fullmatch(label)
        if m:
            plain.append(int(m.group(1)))

    emitted, provenance = [], []
    for slot in sorted(set(plain) | set(generations)):
        if slot % 2 == 1:
            j = (slot - 1) // 2
            if j in replacements.members():
                primed = f"x{slot}p"
                if primed in p.ledger:
                    emitted.append(p.ledger[primed])
                    provenance.append(("replacement", f"x{slot}", primed))
            else:
                emitted.append(p.ledger[f"x{slot}"])
                provenance.append(("kept", f"x{slot}"))
        else:
            settled = true_stability(phi, replacements, slot // 2)
            if settled is None:
                continue
            s0, use = settled
            suffix = max(g for g in generations[slot] if g <= s0 + 1)
            label = f"x{slot}_{suffix}"
            emitted.append(p.ledger[label])
            provenance.append(("stability", slot, s0, use, label))
    return BasisEnumeration(tuple(emitted), tuple(provenance))
