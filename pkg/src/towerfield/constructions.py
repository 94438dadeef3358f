"""Stage-by-stage tower builders with ground-truth sidecars.

Each builder drives a :class:`~towerfield.presentation.Presentation` through a
fixed number of stages, reacting to schedule, chip, or convergence-table
inputs, and returns the finished presentation together with a
:class:`GroundTruth` ledger describing which labels form the intended
transcendence basis, which were made algebraic, and which were replaced by
primed or later-generation successors.

Common stage discipline, shared by every builder:

* Stage ``s`` (counting from 1) first adjoins the curve pair for slot
  ``s - 1``, then performs this stage's rationalizations and replacement
  adjunctions, then runs one closure step.
* An input scheduled at stage ``t`` is acted on from stage ``t + 1`` onward:
  stage ``s`` reacts to what the schedules enumerated *before* ``s``.
* All per-stage sweeps process slots in increasing order, so identical
  recipes replay to byte-identical dumps.

The ground truth describes the limit behaviour of the construction — a slot
whose schedule membership is visible within the build's horizon is classified
by where the construction is headed, not merely by the finite prefix built so
far — but it only ever names labels that exist in the finished ledger.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curves import PAPER, TOY
from .errors import ParseError
from .presentation import Presentation, advance_stage, dump, load, new_presentation
from .schedules import ChipSpec, EnumerationSchedule, PhiTable, stable_use, true_stability

__all__ = [
    "BuildRecipe",
    "GroundTruth",
    "build_singleton",
    "build_upcone",
    "build_upcone_copy",
    "build_edegree",
    "build_edegree_copy",
    "build_fork",
    "fork_prefix",
    "run",
    "ground_truth_to_text",
    "parse_ground_truth",
]

KINDS = ("singleton", "upcone", "upcone_copy", "edegree", "edegree_copy", "fork")


# ---------------------------------------------------------------------------
# ground truth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroundTruth:
    """Which labels the construction intends as basis, algebraic, or replaced.

    ``basis_labels`` and ``algebraic_labels`` are disjoint; every label in
    either set names a generator of the finished presentation.  The
    replacement map records succession: primed pairs standing in for
    swallowed odd-slot pairs, and later generations standing in for retired
    ones.  Labels in neither set carry no claim — e.g. the radical partner
    of a surviving transcendental, which is algebraic over the basis but not
    over the rationals.
    """

    basis_labels: frozenset = field(default_factory=frozenset)
    algebraic_labels: frozenset = field(default_factory=frozenset)
    replacement_map: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis_labels", frozenset(self.basis_labels))
        object.__setattr__(self, "algebraic_labels", frozenset(self.algebraic_labels))
        pairs = self.replacement_map
        if isinstance(pairs, dict):
            pairs = pairs.items()
        pairs = tuple(sorted(pairs))
        seen = set()
        for old, new in pairs:
            if old in seen:
                raise ValueError(f"label {old!r} replaced twice")
            seen.add(old)
        object.__setattr__(self, "replacement_map", pairs)
        overlap = self.basis_labels & self.algebraic_labels
        if overlap:
            raise ValueError(
                f"labels marked both basis and algebraic: {sorted(overlap)}"
            )

    def replacement_of(self, label: str):
        """The successor of ``label``, or None if it was never replaced."""
        for old, new in self.replacement_map:
            if old == label:
                return new
        return None


def ground_truth_to_text(truth: GroundTruth) -> str:
    """Canonical sidecar text: basis, algebraic, then replacement lines."""
    lines = [f"basis {label}" for label in sorted(truth.basis_labels)]
    lines += [f"algebraic {label}" for label in sorted(truth.algebraic_labels)]
    lines += [f"replaced {old} by {new}" for old, new in truth.replacement_map]
    return "\n".join(lines) + "\n"


def parse_ground_truth(text: str) -> GroundTruth:
    """Parse a ground-truth sidecar; raises ParseError with the line number."""
    basis, algebraic, pairs = set(), set(), []
    last_line = 0
    for line_no, raw in enumerate(text.splitlines(), 1):
        last_line = line_no
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "basis" and len(parts) == 2:
            basis.add(parts[1])
        elif parts[0] == "algebraic" and len(parts) == 2:
            algebraic.add(parts[1])
        elif parts[0] == "replaced" and len(parts) == 4 and parts[2] == "by":
            pairs.append((parts[1], parts[3]))
        else:
            raise ParseError(line_no, f"unrecognized ground-truth line {line!r}")
    try:
        return GroundTruth(frozenset(basis), frozenset(algebraic), tuple(pairs))
    except ValueError as exc:
        raise ParseError(last_line + 1, str(exc)) from None


# ---------------------------------------------------------------------------
# recipes
# ---------------------------------------------------------------------------

_REQUIRED = {
    "singleton": ("members",),
    "upcone": ("members",),
    "upcone_copy": ("members", "replacements"),
    "edegree": ("chip",),
    "edegree_copy": ("phi", "replacements"),
    "fork": ("curve_index", "prefix_stages"),
}


@dataclass(frozen=True)
class BuildRecipe:
    """A complete, replayable description of one staged build.

    ``stages`` must not exceed the horizon of any schedule or chip input, so
    every stage the recipe runs is within the region its inputs describe.
    Inputs irrelevant to ``kind`` must be left unset.
    """

    kind: str
    stages: int
    policy: str = TOY
    members: EnumerationSchedule | None = None
    replacements: EnumerationSchedule | None = None
    chip: ChipSpec | None = None
    phi: PhiTable | None = None
    curve_index: int | None = None
    prefix_stages: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown recipe kind {self.kind!r}")
        if self.stages < 1:
            raise ValueError(f"stages must be >= 1, got {self.stages}")
        if self.policy not in (PAPER, TOY):
            raise ValueError(f"unknown prime policy {self.policy!r}")
        required = _REQUIRED[self.kind]
        for name in ("members", "replacements", "chip", "phi", "curve_index", "prefix_stages"):
            value = getattr(self, name)
            if name in required and value is None:
                raise ValueError(f"recipe kind {self.kind!r} requires {name}")
            if name not in required and value is not None:
                raise ValueError(f"recipe kind {self.kind!r} does not take {name}")
        for name in ("members", "replacements", "chip"):
            value = getattr(self, name)
            if value is not None and self.stages > value.horizon:
                raise ValueError(
                    f"stages {self.stages} exceeds the {name} horizon {value.horizon}"
                )
        if self.kind == "fork":
            if self.curve_index < 0:
                raise ValueError(f"curve index must be >= 0, got {self.curve_index}")
            if not 1 <= self.prefix_stages < self.stages:
                raise ValueError(
                    f"prefix stages must lie in [1, stages), got {self.prefix_stages}"
                )


def run(recipe: BuildRecipe):
    """Execute a recipe; returns (Presentation, GroundTruth), or a
    presentation pair for fork recipes."""
    if recipe.kind == "singleton":
        return build_singleton(recipe.members, recipe.stages, recipe.policy)
    if recipe.kind == "upcone":
        return build_upcone(recipe.members, recipe.stages, recipe.policy)
    if recipe.kind == "upcone_copy":
        return build_upcone_copy(
            recipe.members, recipe.replacements, recipe.stages, recipe.policy
        )
    if recipe.kind == "edegree":
        return build_edegree(recipe.chip, recipe.stages, recipe.policy)
    if recipe.kind == "edegree_copy":
        return build_edegree_copy(
            recipe.phi, recipe.replacements, recipe.stages, recipe.policy
        )
    return build_fork(
        recipe.curve_index, recipe.prefix_stages, recipe.stages, recipe.policy
    )


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _acted_on(schedule: EnumerationSchedule, n: int, stage: int) -> bool:
    """True when stage ``stage`` may react to element ``n``: it entered the
    schedule at some strictly earlier stage."""
    entered = schedule.entry_stage(n)
    return entered is not None and entered < stage


def build_singleton(
    members: EnumerationSchedule, stages: int, policy: str = TOY
) -> tuple[Presentation, GroundTruth]:
    """One curve pair per slot; scheduled slots are rationalized one per stage.

    Stage ``s`` adjoins the pair for slot ``s - 1`` and then serves the least
    slot that entered ``members`` before ``s``, is already adjoined, and has
    not been served yet — at most one service per stage, so a burst of
    enumerations drains over consecutive stages.  The basis is exactly the
    x-labels of unscheduled slots.
    """
    p = new_presentation(policy)
    served: set = set()
    for s in range(1, stages + 1):
        slot = s - 1
        events = [("adjoin", slot, f"x{slot}", f"y{slot}")]
        pending = sorted(
            i
            for i in members.members()
            if i < s and i not in served and _acted_on(members, i, s)
        )
        if pending:
            events.append(("rationalize", f"x{pending[0]}"))
            served.add(pending[0])
        advance_stage(p, events=tuple(events))

    basis, algebraic = set(), set()
    for i in range(stages):
        if i in members.members():
            algebraic.update({f"x{i}", f"y{i}"})
        else:
            basis.add(f"x{i}")
    return p, GroundTruth(frozenset(basis), frozenset(algebraic), ())


def build_upcone(
    members: EnumerationSchedule, stages: int, policy: str = TOY
) -> tuple[Presentation, GroundTruth]:
    """Even slots mirror the schedule; odd slots are permanent basis members.

    Slot ``2i`` is rationalized once ``i`` has entered ``members``; odd slots
    are never touched, so the surviving transcendentals are the odd slots
    plus the even slots of non-members — the upward-cone layout.  Unlike the
    singleton builder, every eligible even slot is served the same stage.
    """
    p = new_presentation(policy)
    done: set = set()
    for s in range(1, stages + 1):
        slot = s - 1
        events = [("adjoin", slot, f"x{slot}", f"y{slot}")]
        for i in sorted(members.members()):
            even = 2 * i
            if even < s and even not in done and _acted_on(members, i, s):
                events.append(("rationalize", f"x{even}"))
                done.add(even)
        advance_stage(p, events=tuple(events))
    return p, _cone_ground_truth(members, stages)


def _cone_ground_truth(members: EnumerationSchedule, stages: int) -> GroundTruth:
    basis, algebraic = set(), set()
    for k in range(stages):
        if k % 2 == 1:
            basis.add(f"x{k}")
        elif k // 2 in members.members():
            algebraic.update({f"x{k}", f"y{k}"})
        else:
            basis.add(f"x{k}")
    return GroundTruth(frozenset(basis), frozenset(algebraic), ())


def build_upcone_copy(
    members: EnumerationSchedule,
    replacements: EnumerationSchedule,
    stages: int,
    policy: str = TOY,
) -> tuple[Presentation, GroundTruth]:
    """Upcone evens plus primed replacement of scheduled odd slots.

    When ``j`` enters ``replacements``, the pair at slot ``2j + 1`` is
    swallowed — its x rationalized, its y thereby algebraic — and a fresh
    pair ``x{2j+1}p, y{2j+1}p`` on the same curve is adjoined and recorded in
    the replacement map, so each odd slot still contributes exactly one
    surviving transcendental pair.
    """
    p = new_presentation(policy)
    done_even: set = set()
    replaced: set = set()
    for s in range(1, stages + 1):
        slot = s - 1
        events = [("adjoin", slot, f"x{slot}", f"y{slot}")]
        for i in sorted(members.members()):
            even = 2 * i
            if even < s and even not in done_even and _acted_on(members, i, s):
                events.append(("rationalize", f"x{even}"))
                done_even.add(even)
        for j in sorted(replacements.members()):
            odd = 2 * j + 1
            if odd < s and odd not in replaced and _acted_on(replacements, j, s):
                events.append(("rationalize", f"x{odd}"))
                events.append(("adjoin", odd, f"x{odd}p", f"y{odd}p"))
                replaced.add(odd)
        advance_stage(p, events=tuple(events))

    basis, algebraic, pairs = set(), set(), []
    cone = _cone_ground_truth(members, stages)
    for label in cone.basis_labels | cone.algebraic_labels:
        k = int(label[1:])
        if k % 2 == 0:
            (basis if label in cone.basis_labels else algebraic).add(label)
    for k in range(1, stages, 2):
        if (k - 1) // 2 in replacements.members():
            algebraic.update({f"x{k}", f"y{k}"})
            if k in replaced:
                basis.add(f"x{k}p")
                pairs.append((f"x{k}", f"x{k}p"))
                pairs.append((f"y{k}", f"y{k}p"))
        else:
            basis.add(f"x{k}")
    return p, GroundTruth(frozenset(basis), frozenset(algebraic), tuple(pairs))


def build_edegree(
    chip: ChipSpec, stages: int, policy: str = TOY
) -> tuple[Presentation, GroundTruth]:
    """Even-slot generations retired by chip hits; odd slots permanent.

    Even slot ``2i`` carries a chain of generations ``x{2i}_g`` labelled by
    spawn stage (``g = 0`` for the initial pair).  When the chip value at
    stage ``s`` is ``i`` and slot ``2i`` has a live generation, stage ``s``
    retires that generation and stage ``s + 1`` spawns ``x{2i}_{s+1},
    y{2i}_{s+1}`` on the same curve; a retirement at the final stage leaves
    the slot with no live pair.  A hit on a slot without a live generation
    is a no-op.  The basis holds every odd x plus, for each ``i`` outside
    the chip's infinite-hit set, the final generation of slot ``2i`` when
    that generation is still live.
    """
    p = new_presentation(policy)
    history: dict = {}
    live: set = set()
    pending: set = set()
    for s in range(1, stages + 1):
        events = []
        slot = s - 1
        if slot % 2 == 0:
            events.append(("adjoin", slot, f"x{slot}_0", f"y{slot}_0"))
            history[slot] = [0]
            live.add(slot)
        else:
            events.append(("adjoin", slot, f"x{slot}", f"y{slot}"))
        for k in sorted(pending):
            events.append(("adjoin", k, f"x{k}_{s}", f"y{k}_{s}"))
            history[k].append(s)
            live.add(k)
        pending.clear()
        hit = 2 * chip.value_at(s)
        if hit in live:
            events.append(("rationalize", f"x{hit}_{history[hit][-1]}"))
            live.discard(hit)
            pending.add(hit)
        advance_stage(p, events=tuple(events))

    dead = frozenset(slot for slot in history if slot not in live)
    basis, algebraic, pairs = _generation_ground_truth(
        history, stages, lambda slot, gens: chip.encoded_member(slot // 2), dead
    )
    return p, GroundTruth(basis, algebraic, pairs)


def _generation_ground_truth(
    history: dict, stages: int, keep_final, dead: frozenset = frozenset()
) -> tuple:
    """Classify generation chains: retired generations are algebraic, the
    final one is basis when ``keep_final(slot, gens)`` says so.  Slots in
    ``dead`` ended with their last generation retired and unreplaced, so
    every generation is algebraic and none reaches the basis."""
    basis, algebraic, pairs = set(), set(), []
    for k in range(1, stages, 2):
        basis.add(f"x{k}")
    for slot in sorted(history):
        gens = history[slot]
        for prev, nxt in zip(gens, gens[1:]):
            algebraic.update({f"x{slot}_{prev}", f"y{slot}_{prev}"})
            pairs.append((f"x{slot}_{prev}", f"x{slot}_{nxt}"))
            pairs.append((f"y{slot}_{prev}", f"y{slot}_{nxt}"))
        if slot in dead:
            algebraic.update({f"x{slot}_{gens[-1]}", f"y{slot}_{gens[-1]}"})
        elif keep_final(slot, gens):
            basis.add(f"x{slot}_{gens[-1]}")
    return frozenset(basis), frozenset(algebraic), tuple(pairs)


def build_edegree_copy(
    phi: PhiTable,
    replacements: EnumerationSchedule,
    stages: int,
    policy: str = TOY,
) -> tuple[Presentation, GroundTruth]:
    """Generations retired by default unless a convergence row protects them.

    Each stage sweeps every previously adjoined even slot and retires its
    current generation unless ``stable_use`` reports a convergence row for
    the previous stage whose use-region the replacement schedule leaves
    untouched this stage.  Odd slots follow the primed-replacement rule
    driven by ``replacements``, exactly as in :func:`build_upcone_copy`.
    The basis keeps a slot's final generation only when some row is stable
    through the schedule's whole horizon and the incumbent that row
    designates is the generation that actually survived.
    """
    p = new_presentation(policy)
    history: dict = {}
    replaced: set = set()
    for s in range(1, stages + 1):
        slot = s - 1
        if slot % 2 == 0:
            events = [("adjoin", slot, f"x{slot}_0", f"y{slot}_0")]
            history[slot] = [0]
        else:
            events = [("adjoin", slot, f"x{slot}", f"y{slot}")]
        for even in sorted(history):
            if even == slot:
                continue  # spawned this stage; faces scrutiny from the next
            if stable_use(phi, replacements, even // 2, s - 1) is None:
                old = history[even][-1]
                events.append(("rationalize", f"x{even}_{old}"))
                events.append(("adjoin", even, f"x{even}_{s}", f"y{even}_{s}"))
                history[even].append(s)
        for j in sorted(replacements.members()):
            odd = 2 * j + 1
            if odd < s and odd not in replaced and _acted_on(replacements, j, s):
                events.append(("rationalize", f"x{odd}"))
                events.append(("adjoin", odd, f"x{odd}p", f"y{odd}p"))
                replaced.add(odd)
        advance_stage(p, events=tuple(events))

    def keep_final(slot: int, gens: list) -> bool:
        settled = true_stability(phi, replacements, slot // 2)
        if settled is None:
            return False
        s0, _use = settled
        incumbent = max(g for g in gens if g <= s0 + 1)
        return incumbent == gens[-1]

    basis, algebraic, pairs = _generation_ground_truth(history, stages, keep_final)
    basis, algebraic, pairs = set(basis), set(algebraic), list(pairs)
    for k in range(1, stages, 2):
        if (k - 1) // 2 in replacements.members():
            basis.discard(f"x{k}")
            algebraic.update({f"x{k}", f"y{k}"})
            if k in replaced:
                basis.add(f"x{k}p")
                pairs.append((f"x{k}", f"x{k}p"))
                pairs.append((f"y{k}", f"y{k}p"))
    return p, GroundTruth(frozenset(basis), frozenset(algebraic), tuple(sorted(pairs)))


def fork_prefix(curve_index: int, prefix_stages: int, policy: str = TOY) -> Presentation:
    """The shared trunk of a fork: one curve pair, then quiet closure stages."""
    if prefix_stages < 1:
        raise ValueError(f"prefix needs at least one stage, got {prefix_stages}")
    p = new_presentation(policy)
    advance_stage(p, events=(("adjoin", curve_index, "x1", "y1"),))
    for _ in range(prefix_stages - 1):
        advance_stage(p)
    return p


def build_fork(
    curve_index: int, prefix_stages: int, total_stages: int, policy: str = TOY
) -> tuple[Presentation, Presentation]:
    """Two presentations of one field diverging after a shared prefix.

    Both branches replay the identical prefix — the dumps extend it fact for
    fact.  The first branch keeps the pair ``x1, y1`` transcendental and
    adjoins one fresh independent transcendental ``y2, y3, ...`` per stage;
    the second rationalizes ``x1`` at its first post-prefix stage, leaving
    ``y1`` algebraic, and then adjoins the same independent transcendentals.
    """
    if not prefix_stages < total_stages:
        raise ValueError(
            f"total stages {total_stages} must exceed prefix stages {prefix_stages}"
        )
    sigma = dump(fork_prefix(curve_index, prefix_stages, policy))
    keep, collapse = load(sigma), load(sigma)
    for step, _stage in enumerate(range(prefix_stages + 1, total_stages + 1)):
        label = f"y{step + 2}"
        keep_events = [("adjoin_trans", label)]
        collapse_events = list(keep_events)
        if step == 0:
            collapse_events.insert(0, ("rationalize", "x1"))
        advance_stage(keep, events=tuple(keep_events))
        advance_stage(collapse, events=tuple(collapse_events))
    return keep, collapse
