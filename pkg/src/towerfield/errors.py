"""Exception types shared across the package.

Every error raised by the library proper derives from :class:`TowerFieldError`
so callers can catch the whole family at once.  The CLI maps these onto its
exit-code contract (1 for malformed input, 2 for verification failure, 3 for
an inconclusive bounded search).
"""

from __future__ import annotations


class TowerFieldError(Exception):
    """Base class for all library errors."""


class DivisionByZero(TowerFieldError, ZeroDivisionError):
    """Inversion or division was attempted on the zero element."""


class TowerMismatch(TowerFieldError):
    """Two field elements from different towers were combined."""


class DegenerateRadicand(TowerFieldError):
    """A radical adjunction or rewrite produced a zero radicand."""


class ReducibleRelation(TowerFieldError):
    """A radical adjunction was attempted over a q-th-power radicand."""


class DuplicateLabel(TowerFieldError):
    """A generator label was reused within one tower or presentation."""


class SubstitutionSingularity(TowerFieldError):
    """A substitution made some denominator vanish."""


class NotTranscendental(TowerFieldError):
    """A rationalization targeted a label that is not a live transcendental."""


class UnknownLabel(TowerFieldError):
    """A label was looked up that the ledger does not contain."""


class TrivialSolution(TowerFieldError):
    """Derived-solution formulas were applied to a pair with x*y = 0."""


class InconsistentSpec(TowerFieldError):
    """Two schedules disagreed while being joined."""


class ParseError(TowerFieldError):
    """A text artifact (dump, schedule, chip table, ...) failed to parse."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message


class SlowSearchDisabled(TowerFieldError):
    """A long-running prime search was requested without allow_slow."""
