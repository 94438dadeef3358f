"""Finite-stage schedules that stand in for enumeration-style inputs.

Three small immutable tables drive the staged builders and the reduction
checks:

* :class:`EnumerationSchedule` — which numbers enter a growing set, and when,
  up to an explicit horizon.  Post-horizon behavior is quiescent by fiat.
* :class:`ChipSpec` — a total stage-to-value table with an eventually cyclic
  tail.  The set it encodes is the set of values hit only finitely often:
  exactly the values that are not part of the declared tail cycle.
* :class:`PhiTable` — use-annotated convergence rows ``(input, stage, use)``
  for an oracle computation consulted by the stability checks.

All values are immutable and every operation is pure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InconsistentSpec, ParseError

__all__ = [
    "EnumerationSchedule",
    "ChipSpec",
    "PhiTable",
    "member_at",
    "stable_use",
    "true_stability",
    "join_spec",
    "parse_schedule",
    "parse_chips",
    "parse_phi",
    "schedule_to_text",
    "chips_to_text",
    "phi_to_text",
]


@dataclass(frozen=True)
class EnumerationSchedule:
    """Finite enumeration: ``entries`` maps elements to their entry stage.

    ``entries`` is a canonically sorted tuple of ``(element, stage)`` pairs
    with at most one stage per element; every stage lies in ``[0, horizon]``.
    """

    entries: tuple
    horizon: int

    def __post_init__(self) -> None:
        seen = set()
        for pair in self.entries:
            n, s = pair
            if n < 0 or s < 0:
                raise ValueError(f"negative schedule entry {pair}")
            if n in seen:
                raise ValueError(f"element {n} scheduled twice")
            seen.add(n)
            if s > self.horizon:
                raise ValueError(
                    f"entry stage {s} for element {n} exceeds horizon {self.horizon}"
                )
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    @classmethod
    def from_pairs(cls, pairs, horizon: int | None = None) -> "EnumerationSchedule":
        pairs = tuple(sorted(pairs))
        if horizon is None:
            horizon = max((s for _, s in pairs), default=0)
        return cls(pairs, horizon)

    def entry_stage(self, n: int):
        for m, s in self.entries:
            if m == n:
                return s
        return None

    def members(self) -> frozenset:
        return frozenset(n for n, _ in self.entries)


def member_at(schedule: EnumerationSchedule, n: int, s: int) -> bool:
    """True iff n has entered by stage s (monotone in s)."""
    stage = schedule.entry_stage(n)
    return stage is not None and stage <= s


@dataclass(frozen=True)
class ChipSpec:
    """Total stage-to-value table: ``chips[s]`` on ``[0, horizon]``, then the
    ``tail_cycle`` repeating forever.

    The encoded set is ``{n : n hit only finitely often}`` — every value not
    appearing in the tail cycle, whether or not the chip table ever hits it.
    """

    chips: tuple
    tail_cycle: tuple

    def __post_init__(self) -> None:
        if not self.chips:
            raise ValueError("chip table must cover at least stage 0")
        if not self.tail_cycle:
            raise ValueError("tail cycle must declare at least one value")
        for v in self.chips + self.tail_cycle:
            if v < 0:
                raise ValueError(f"chip values must be >= 0, got {v}")

    @property
    def horizon(self) -> int:
        return len(self.chips) - 1

    def value_at(self, s: int) -> int:
        if s < 0:
            raise ValueError(f"stage must be >= 0, got {s}")
        if s < len(self.chips):
            return self.chips[s]
        return self.tail_cycle[(s - len(self.chips)) % len(self.tail_cycle)]

    def infinite_hits(self) -> frozenset:
        return frozenset(self.tail_cycle)

    def encoded_member(self, n: int) -> bool:
        return n not in self.infinite_hits()


@dataclass(frozen=True)
class PhiTable:
    """Convergence rows ``(input, stage, use)``, one row per (input, stage)."""

    rows: tuple

    def __post_init__(self) -> None:
        seen = set()
        for row in self.rows:
            i, s, u = row
            if i < 0 or s < 0 or u < 0:
                raise ValueError(f"negative value in row {row}")
            if (i, s) in seen:
                raise ValueError(f"duplicate row for input {i} at stage {s}")
            seen.add((i, s))
        object.__setattr__(self, "rows", tuple(sorted(self.rows)))

    def use_at(self, i: int, s: int):
        for j, t, u in self.rows:
            if j == i and t == s:
                return u
        return None

    def rows_for(self, i: int) -> tuple:
        return tuple((s, u) for j, s, u in self.rows if j == i)


def stable_use(phi: PhiTable, d: EnumerationSchedule, i: int, s: int):
    """Use u of a row (i, s, u) whose restraint survives one stage.

    Returns u when the row exists and nothing below u enters d at stage s+1;
    None otherwise.
    """
    u = phi.use_at(i, s)
    if u is None:
        return None
    for n, t in d.entries:
        if n < u and t == s + 1:
            return None
    return u


def true_stability(phi: PhiTable, d: EnumerationSchedule, i: int):
    """Least (s, u) whose use-region of d never changes after s.

    Scans the convergence rows for input i in stage order and returns the
    first whose restraint ``d`` restricted below u is final: no element
    below u enters at any stage after s (through d's horizon, which is the
    finite surrogate for "never again").  None when no row survives.
    """
    for s, u in phi.rows_for(i):
        if all(not (n < u and t > s) for n, t in d.entries):
            return (s, u)
    return None


def join_spec(c: EnumerationSchedule, complement_witness) -> ChipSpec:
    """Chip table whose encoded set joins c's members with non-members.

    Members n of c are coded as 2n, witnessed non-members as 2n+1.  The
    witness set must be disjoint from c's members (InconsistentSpec
    otherwise).  Values in the probed range [0, max code] that are not part
    of the join are placed on the tail cycle so they are hit infinitely
    often; when the join covers the whole probed range a sentinel beyond it
    keeps the cycle nonempty.
    """
    witness = frozenset(complement_witness)
    overlap = witness & c.members()
    if overlap:
        raise InconsistentSpec(
            f"witness set intersects members: {sorted(overlap)}"
        )
    joined = sorted({2 * n for n in c.members()} | {2 * n + 1 for n in witness})
    probe_max = joined[-1] if joined else 0
    tail = tuple(m for m in range(probe_max + 1) if m not in set(joined))
    if not tail:
        tail = (probe_max + 1,)
    chips = tuple(joined) if joined else (tail[0],)
    return ChipSpec(chips, tail)


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------


def _lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_no, line


def _int_field(line_no: int, token: str, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(line_no, f"{what} must be an integer, got {token!r}") from None
    if value < 0:
        raise ParseError(line_no, f"{what} must be >= 0, got {value}")
    return value


def parse_schedule(text: str) -> EnumerationSchedule:
    """Parse lines ``enter <n> at <s>`` and ``horizon <s>``."""
    entries = {}
    entry_lines = {}
    horizon = None
    for line_no, line in _lines(text):
        parts = line.split()
        if parts[0] == "enter" and len(parts) == 4 and parts[2] == "at":
            n = _int_field(line_no, parts[1], "element")
            s = _int_field(line_no, parts[3], "stage")
            if n in entries:
                raise ParseError(line_no, f"element {n} scheduled twice")
            entries[n] = s
            entry_lines[n] = line_no
        elif parts[0] == "horizon" and len(parts) == 2:
            horizon = _int_field(line_no, parts[1], "horizon")
        else:
            raise ParseError(line_no, f"unrecognized schedule line {line!r}")
    if horizon is None:
        horizon = max(entries.values(), default=0)
    for n, s in entries.items():
        if s > horizon:
            raise ParseError(
                entry_lines[n], f"entry stage {s} exceeds horizon {horizon}"
            )
    return EnumerationSchedule(tuple(sorted(entries.items())), horizon)


def schedule_to_text(schedule: EnumerationSchedule) -> str:
    lines = [f"enter {n} at {s}" for n, s in sorted(schedule.entries)]
    lines.append(f"horizon {schedule.horizon}")
    return "\n".join(lines) + "\n"


def parse_chips(text: str) -> ChipSpec:
    """Parse ``chip <s> <value>``, ``tail cycle <v1> ...``, ``horizon <s>``."""
    table = {}
    tail = None
    horizon = None
    last_line = 0
    for line_no, line in _lines(text):
        last_line = line_no
        parts = line.split()
        if parts[0] == "chip" and len(parts) == 3:
            s = _int_field(line_no, parts[1], "stage")
            v = _int_field(line_no, parts[2], "value")
            if s in table:
                raise ParseError(line_no, f"stage {s} assigned twice")
            table[s] = v
        elif parts[:2] == ["tail", "cycle"] and len(parts) > 2:
            if tail is not None:
                raise ParseError(line_no, "tail cycle declared twice")
            tail = tuple(
                _int_field(line_no, tok, "tail value") for tok in parts[2:]
            )
        elif parts[0] == "horizon" and len(parts) == 2:
            horizon = _int_field(line_no, parts[1], "horizon")
        else:
            raise ParseError(line_no, f"unrecognized chip line {line!r}")
    if tail is None:
        raise ParseError(last_line + 1, "chip file ends without a tail cycle")
    if not table:
        raise ParseError(last_line + 1, "chip file declares no chips")
    top = max(table)
    if len(table) != top + 1:
        missing = next(s for s in range(top + 1) if s not in table)
        raise ParseError(last_line + 1, f"chip table has no value for stage {missing}")
    if horizon is not None and horizon != top:
        raise ParseError(
            last_line + 1, f"declared horizon {horizon} but chip table ends at {top}"
        )
    return ChipSpec(tuple(table[s] for s in range(top + 1)), tail)


def chips_to_text(spec: ChipSpec) -> str:
    lines = [f"chip {s} {v}" for s, v in enumerate(spec.chips)]
    lines.append("tail cycle " + " ".join(str(v) for v in spec.tail_cycle))
    lines.append(f"horizon {spec.horizon}")
    return "\n".join(lines) + "\n"


def parse_phi(text: str) -> PhiTable:
    """Parse lines ``phi <i> at <s> use <u>``."""
    rows = []
    seen = set()
    for line_no, line in _lines(text):
        parts = line.split()
        if (
            parts[0] == "phi"
            and len(parts) == 6
            and parts[2] == "at"
            and parts[4] == "use"
        ):
            i = _int_field(line_no, parts[1], "input")
            s = _int_field(line_no, parts[3], "stage")
            u = _int_field(line_no, parts[5], "use")
            if (i, s) in seen:
                raise ParseError(line_no, f"duplicate row for input {i} at stage {s}")
            seen.add((i, s))
            rows.append((i, s, u))
        else:
            raise ParseError(line_no, f"unrecognized phi line {line!r}")
    return PhiTable(tuple(rows))


def phi_to_text(phi: PhiTable) -> str:
    lines = [f"phi {i} at {s} use {u}" for i, s, u in phi.rows]
    return "\n".join(lines) + ("\n" if lines else "")
