"""Plane curves X**q + Y**q - 1 and their prime-exponent schedules.

Two exponent policies are provided.  The sparse policy starts at 5 and jumps
to the least prime beyond (4(q-1)(q-2))**2 at every step, which keeps the
genus of each curve beyond the squared gonality bound of its predecessor; its
third entry sits near 4.5e14 and is only searched when explicitly allowed.
The toy policy walks the odd primes from 5 upward and is the default for
multi-curve constructions, where exactness rather than sparseness is what
matters.

Primality here is certified by wheel trial division; no probabilistic tests
are involved anywhere.
"""

from __future__ import annotations

import threading
from fractions import Fraction

from .arith import FieldElement
from .errors import SlowSearchDisabled, TrivialSolution
from .polynomials import MPoly, rational_qth_root

PAPER = "paper"
TOY = "toy"

#: candidate offsets coprime to 30 (wheel for trial division)
_WHEEL = (1, 7, 11, 13, 17, 19, 23, 29)


def is_prime(n: int) -> bool:
    """Deterministic primality by 2-3-5 wheel trial division."""
    if n < 2:
        return False
    for p in (2, 3, 5):
        if n == p:
            return True
        if n % p == 0:
            return False
    base = 0
    while True:
        for off in _WHEEL:
            d = base + off
            if d == 1:
                continue
            if d * d > n:
                return True
            if n % d == 0:
                return False
        base += 30


def _next_prime_above(bound: int) -> int:
    n = bound + 1
    while not is_prime(n):
        n += 1
    return n


class PrimeSequence:
    """Monotone cache of curve exponents for one policy."""

    def __init__(self, policy: str):
        if policy not in (PAPER, TOY):
            raise ValueError(f"unknown policy {policy!r}")
        self.policy = policy
        self._cache: list[int] = [5]
        self._lock = threading.Lock()

    def q(self, index: int, allow_slow: bool = False) -> int:
        if index < 0:
            raise ValueError("curve index must be nonnegative")
        with self._lock:
            while len(self._cache) <= index:
                self._extend(allow_slow)
            return self._cache[index]

    def _extend(self, allow_slow: bool) -> None:
        last = self._cache[-1]
        if self.policy == TOY:
            self._cache.append(_next_prime_above(last))
            return
        bound = (4 * (last - 1) * (last - 2)) ** 2
        if bound > 10**9 and not allow_slow:
            raise SlowSearchDisabled(
                f"searching the least prime above {bound} requires allow_slow"
            )
        self._cache.append(_next_prime_above(bound))


_SEQUENCES = {PAPER: PrimeSequence(PAPER), TOY: PrimeSequence(TOY)}


def prime_sequence(index: int, policy: str = PAPER, allow_slow: bool = False) -> int:
    """Exponent of curve `index` under the given policy."""
    seq = _SEQUENCES.get(policy)
    if seq is None:
        raise ValueError(f"unknown policy {policy!r}")
    return seq.q(index, allow_slow)


def genus(degree: int) -> int:
    """Genus of a smooth plane curve of the given degree."""
    if degree < 1:
        raise ValueError("degree must be positive")
    return (degree - 1) * (degree - 2) // 2


class CurvePoly:
    """The defining polynomial X**q + Y**q - 1 with exact evaluation."""

    __slots__ = ("q",)

    def __init__(self, q: int):
        self.q = q

    def __repr__(self) -> str:
        return f"CurvePoly(q={self.q})"

    def __str__(self) -> str:
        return f"X^{self.q}+Y^{self.q}-1"

    def as_mpoly(self) -> MPoly:
        one = Fraction(1)
        return MPoly(2, {(self.q, 0): one, (0, self.q): one, (0, 0): -one})

    def evaluate(self, x, y):
        """Value at a point; accepts rationals, field elements, or a mix."""
        x, y = _common_algebra(x, y)
        if isinstance(x, Fraction):
            return x**self.q + y**self.q - 1
        return x**self.q + y**self.q - x.tower.one()


def curve_poly(index: int, policy: str = PAPER, allow_slow: bool = False) -> CurvePoly:
    return CurvePoly(prime_sequence(index, policy, allow_slow))


def evaluate_curve(index: int, x, y, policy: str = PAPER, allow_slow: bool = False):
    return curve_poly(index, policy, allow_slow).evaluate(x, y)


def rational_solutions(index: int, policy: str = PAPER) -> set:
    """All rational points of curve `index`: the two axis points."""
    del index, policy  # every curve in the family has the same rational points
    zero, one = Fraction(0), Fraction(1)
    return {(zero, one), (one, zero)}


def exhaustive_rational_search(q: int, height: int) -> set:
    """Rational points (x, y) on X**q + Y**q = 1 with x of bounded height.

    Enumerates every reduced rational x with |num|, den <= height and extracts
    an exact rational q-th root of 1 - x**q, so y is unconstrained.  Used to
    corroborate `rational_solutions` on a finite window.
    """
    found = set()
    for den in range(1, height + 1):
        for num in range(-height, height + 1):
            x = Fraction(num, den)
            if x.denominator != den:
                continue  # not in lowest terms; already visited
            y = rational_qth_root(1 - x**q, q)
            if y is not None:
                found.add((x, y))
    return found


def derived_solutions(x, y, q: int) -> list:
    """The six solutions generated from one nontrivial solution (x, y).

    Requires x*y != 0 (the axis points are fixed by these maps up to
    transposition and generate nothing new); raises TrivialSolution otherwise.
    The maps combine (x, y) -> (-x/y, 1/y) and (x, y) -> (-y/x, 1/x) with the
    coordinate swap.  Accepts rational input or a solution in a tower field.
    """
    del q  # the recipe is exponent-independent; q documents the intended curve
    x, y = _common_algebra(x, y)
    if _is_zero(x) or _is_zero(y):
        raise TrivialSolution("derived solutions need x*y != 0")
    if isinstance(x, Fraction):
        inv_x, inv_y = 1 / x, 1 / y
    else:
        inv_x, inv_y = x.invert(), y.invert()
    primary = [
        (x, y),
        (-x * inv_y, inv_y),
        (-y * inv_x, inv_x),
    ]
    return primary + [(b, a) for a, b in primary]


def _is_zero(v) -> bool:
    return v.is_zero if isinstance(v, FieldElement) else v == 0


def _common_algebra(x, y):
    """Coerce a rational/field-element pair into one arithmetic domain."""
    if isinstance(x, FieldElement) and not isinstance(y, FieldElement):
        return x, x.tower.rational(Fraction(y))
    if isinstance(y, FieldElement) and not isinstance(x, FieldElement):
        return y.tower.rational(Fraction(x)), y
    if not isinstance(x, FieldElement):
        return Fraction(x), Fraction(y)
    return x, y


def orbit_count(q: int) -> int:
    """Number of solutions over the algebraic closure: 6*q**2."""
    return 6 * q * q
