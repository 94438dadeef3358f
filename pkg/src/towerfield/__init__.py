"""towerfield: computable field presentations over radical towers.

The package builds finite, replayable presentations of fields obtained from Q
by adjoining transcendentals and odd-prime radicals tied to plane curves of
the shape X**q + Y**q - 1, together with schedule-driven constructions and
bounded search procedures that recover the schedules back from the built
objects.
"""

from .errors import (
    DegenerateRadicand,
    DivisionByZero,
    DuplicateLabel,
    InconsistentSpec,
    NotTranscendental,
    ParseError,
    ReducibleRelation,
    SlowSearchDisabled,
    SubstitutionSingularity,
    TowerFieldError,
    TowerMismatch,
    TrivialSolution,
    UnknownLabel,
)

__all__ = [
    "DegenerateRadicand",
    "DivisionByZero",
    "DuplicateLabel",
    "InconsistentSpec",
    "NotTranscendental",
    "ParseError",
    "ReducibleRelation",
    "SlowSearchDisabled",
    "SubstitutionSingularity",
    "TowerFieldError",
    "TowerMismatch",
    "TrivialSolution",
    "UnknownLabel",
]
