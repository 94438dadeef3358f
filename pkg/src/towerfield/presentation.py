"""Finite-stage computable presentations of tower fields.

A :class:`Presentation` is an append-only relational atomic diagram over an
initial segment of the naturals: domain indices, a growing list of positive
``add``/``mul`` facts, and an injective symbolic interpretation of every index
as a tower-field element.  Builders grow it in stages: adjoining curve pairs
(a fresh transcendental x and a radical y with y**q = 1 - x**q), rationalizing
a transcendental to a small integer, and closing under the field operations
one element at a time along a fair dovetail order.

Facts are never removed or altered.  Rationalization rewrites the
interpretation map (and the tower), never the facts; every recorded fact is
re-checked after the rewrite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    FieldElement,
    Tower,
    embed,
    element_to_text,
    substitute,
    substituted_tower,
    text_to_element,
)
from .curves import PAPER, TOY, prime_sequence
from .errors import (
    DegenerateRadicand,
    DuplicateLabel,
    NotTranscendental,
    ParseError,
    ReducibleRelation,
    SubstitutionSingularity,
    UnknownLabel,
)

__all__ = [
    "Fact",
    "Presentation",
    "new_presentation",
    "adjoin_curve_pair",
    "rationalize",
    "closure_step",
    "advance_stage",
    "dump",
    "load",
    "verify",
]

_RATIONALIZE_CANDIDATE_CAP = 10_000


@dataclass(frozen=True)
class Fact:
    """One positive diagram line: ``a kind b = c`` over domain indices."""

    kind: str  # "add" | "mul"
    a: int
    b: int
    c: int

    def line(self) -> str:
        return f"{self.kind} {self.a} {self.b} {self.c}"


def _dovetail_triple(position: int):
    """Decode a flat cursor position into its (op, a, b) request.

    Requests are blocked by m = max(a, b): within block m the pairs run
    (0,m), (1,m), ..., (m,m), (m,m-1), ..., (m,0), each pair first as an
    addition and then as a multiplication.  Every op/pair combination over
    any initial segment of the domain appears exactly once, which is what
    the fairness property needs.
    """
    m, k = 0, position
    while k >= 2 * (2 * m + 1):
        k -= 2 * (2 * m + 1)
        m += 1
    pair_i, op_i = divmod(k, 2)
    if pair_i <= m:
        a, b = pair_i, m
    else:
        a, b = m, 2 * m - pair_i
    return ("add", "mul")[op_i], a, b


class Presentation:
    """Single-owner mutable presentation; use the module functions to grow it.

    The dovetail cursor is not independent state: it always points at the
    least request position not yet covered by a recorded fact, so a dump
    (which has no cursor section) reconstructs it for free.
    """

    __slots__ = (
        "policy",
        "domain_size",
        "facts",
        "interpretation",
        "tower",
        "ledger",
        "rationalized",
        "stage",
        "_cursor",
        "_covered",
        "_index_of",
    )

    def __init__(self, policy: str):
        if policy not in (PAPER, TOY):
            raise ValueError(f"unknown prime policy {policy!r}")
        self.policy = policy
        self.domain_size = 0
        self.facts: list = []
        self.interpretation: dict = {}
        self.tower = Tower()
        self.ledger: dict = {}
        self.rationalized: dict = {}
        self.stage = 0
        self._cursor = 0
        self._covered: set = set()
        self._index_of: dict = {}

    # -- internal bookkeeping -------------------------------------------

    def _allocate(self, element: FieldElement) -> int:
        """Index of the element, allocating a fresh one on first sight."""
        found = self._index_of.get(element)
        if found is not None:
            return found
        index = self.domain_size
        self.domain_size += 1
        self.interpretation[index] = element
        self._index_of[element] = index
        return index

    def _append_fact(self, fact: Fact) -> None:
        self.facts.append(fact)
        self._covered.add((fact.kind, fact.a, fact.b))

    def _record(self, kind: str, a: int, b: int) -> int:
        """Compute a ∘ b symbolically, intern the value, record the fact."""
        left, right = self.interpretation[a], self.interpretation[b]
        value = left + right if kind == "add" else left * right
        c = self._allocate(value)
        self._append_fact(Fact(kind, a, b, c))
        return c

    def _reembed_all(self) -> None:
        """Re-express every interpreted element in the (extended) tower."""
        self.interpretation = {
            i: embed(el, self.tower) for i, el in self.interpretation.items()
        }
        self._index_of = {el: i for i, el in self.interpretation.items()}

    def _require_interpretation(self) -> None:
        if len(self.interpretation) < self.domain_size:
            raise ValueError(
                "presentation was loaded without its interpretation section "
                "and cannot be advanced"
            )

    def _ledger_role(self, label: str) -> str:
        if label in self.rationalized:
            value = self.rationalized[label]
            return f"rationalized a={value.numerator}/{value.denominator}"
        if label in self.tower.rad_labels:
            q = self.tower.rad_qs[self.tower.rad_labels.index(label)]
            return f"radical q={q}"
        return "transcendental"

    def __repr__(self) -> str:
        return (
            f"Presentation(policy={self.policy!r}, stage={self.stage}, "
            f"domain={self.domain_size}, facts={len(self.facts)})"
        )


def new_presentation(policy: str = PAPER) -> Presentation:
    """Fresh presentation of the prime field fragment {0, 1}.

    Index 0 interprets as the field's zero and index 1 as its one; the seed
    diagram records 1·1 = 1 and leaves the remaining small products and sums
    to the first few closure steps.
    """
    p = Presentation(policy)
    p._allocate(p.tower.zero())
    p._allocate(p.tower.one())
    p.ledger["zero"] = 0
    p.ledger["one"] = 1
    p.rationalized["zero"] = Fraction(0)
    p.rationalized["one"] = Fraction(1)
    p._append_fact(Fact("mul", 1, 1, 1))
    return p


def _power_chain(p: Presentation, base_index: int, q: int) -> int:
    """Record mul facts raising an element to the q-th power.

    Square-and-multiply keeps the chain to O(log q) facts, so even very
    large curve exponents stay cheap.  Returns the index of the power.
    """
    bits = bin(q)[3:]  # q >= 5, drop the leading 1
    current = base_index
    for bit in bits:
        current = p._record("mul", current, current)
        if bit == "1":
            current = p._record("mul", current, base_index)
    return current


def adjoin_curve_pair(
    p: Presentation, curve_index: int, label_x: str, label_y: str
):
    """Adjoin the generic curve pair for curve ``curve_index``.

    Adds a transcendental x and a radical y with y**q = 1 - x**q to the
    tower, gives both fresh domain indices, and records the fact chain that
    exhibits x**q + y**q = 1 inside the diagram (powers by repeated squaring,
    then one addition whose result collides with the index of one).
    """
    p._require_interpretation()
    if label_x == label_y:
        raise DuplicateLabel(f"labels must differ, both are {label_x!r}")
    for label in (label_x, label_y):
        if label in p.ledger:
            raise DuplicateLabel(f"label {label!r} already in use")
    q = prime_sequence(curve_index, p.policy)
    p.tower = p.tower.adjoin_transcendental(label_x)
    x = p.tower.gen(label_x)
    radicand = p.tower.one() - x ** q
    p.tower = p.tower.adjoin_radical(label_y, q, radicand)
    p._reembed_all()
    x = p.tower.gen(label_x)
    y = p.tower.gen(label_y)
    before = p.domain_size
    ix = p._allocate(x)
    iy = p._allocate(y)
    assert p.domain_size == before + 2, "curve generators must be fresh"
    p.ledger[label_x] = ix
    p.ledger[label_y] = iy
    ixq = _power_chain(p, ix, q)
    iyq = _power_chain(p, iy, q)
    isum = p._record("add", ixq, iyq)
    assert isum == p.ledger["one"], "x**q + y**q must collide with one"
    return ix, iy


def adjoin_transcendental_element(p: Presentation, label: str) -> int:
    """Adjoin a plain transcendental generator with its own domain index.

    Used by builders that need independent transcendentals without a curve
    partner; the ledger records it with the ordinary transcendental role.
    """
    p._require_interpretation()
    if label in p.ledger:
        raise DuplicateLabel(f"label {label!r} already in use")
    p.tower = p.tower.adjoin_transcendental(label)
    p._reembed_all()
    before = p.domain_size
    index = p._allocate(p.tower.gen(label))
    assert index == before, "a fresh transcendental cannot collide"
    p.ledger[label] = index
    return index


def rationalize(p: Presentation, label: str) -> Fraction:
    """Replace the transcendental ``label`` by the first workable integer.

    Candidates are tried in the fixed order 2, 3, 4, ... (0 and ±1 are never
    candidates: they give the known rational curve solutions or degenerate
    radicands).  A candidate is rejected when the rewritten radicand is zero
    or a perfect q-th power, when any interpreted denominator vanishes, or
    when two domain indices would collapse to the same value.  On success the
    tower and the whole interpretation are rewritten in place and every
    previously recorded fact is re-checked.
    """
    p._require_interpretation()
    if label not in p.ledger:
        raise UnknownLabel(f"label {label!r} not in ledger")
    if label in p.rationalized or label not in p.tower.trans_labels:
        raise NotTranscendental(f"label {label!r} does not denote a transcendental")
    candidate = 2
    while candidate < _RATIONALIZE_CANDIDATE_CAP:
        value = Fraction(candidate)
        try:
            new_tower = substituted_tower(p.tower, label, value)
            new_interp = {
                i: substitute(el, label, value, new_tower)
                for i, el in p.interpretation.items()
            }
        except (DegenerateRadicand, ReducibleRelation, SubstitutionSingularity):
            candidate += 1
            continue
        if len(set(new_interp.values())) == p.domain_size:
            p.tower = new_tower
            p.interpretation = new_interp
            p._index_of = {el: i for i, el in new_interp.items()}
            p.rationalized[label] = value
            for fact in p.facts:
                left = p.interpretation[fact.a]
                right = p.interpretation[fact.b]
                got = left + right if fact.kind == "add" else left * right
                assert got == p.interpretation[fact.c], (
                    f"fact {fact.line()} broke under {label} = {value}"
                )
            return value
        candidate += 1
    raise RuntimeError(
        f"no rationalization candidate below {_RATIONALIZE_CANDIDATE_CAP} "
        f"worked for {label!r}"
    )


def closure_step(p: Presentation) -> Presentation:
    """Process the least uncovered dovetail request and record its fact.

    Requests already covered by a fact (seed facts, curve chains) are skipped,
    so the cursor is simply the least position without a fact.  The result
    value is interned: a collision records a fact pointing at the existing
    index, a new value gets the next free index.
    """
    p._require_interpretation()
    while True:
        kind, a, b = _dovetail_triple(p._cursor)
        if (kind, a, b) not in p._covered:
            break
        p._cursor += 1
    assert max(a, b) < p.domain_size, (
        f"dovetail reached ({a}, {b}) with domain {p.domain_size}; "
        "closure cannot outrun domain growth"
    )
    p._record(kind, a, b)
    p._cursor += 1
    return p


def advance_stage(p: Presentation, events=(), closures: int = 1) -> Presentation:
    """Apply one stage: scheduled events, then closure steps, then stage+1.

    Events are tuples: ``("adjoin", curve_index, label_x, label_y)``,
    ``("adjoin_trans", label)``, ``("rationalize", label)``, or
    ``("close", count)`` for extra closure steps.  The trailing closure
    budget defaults to one element per stage.
    """
    for event in events:
        if event[0] == "adjoin":
            adjoin_curve_pair(p, event[1], event[2], event[3])
        elif event[0] == "adjoin_trans":
            adjoin_transcendental_element(p, event[1])
        elif event[0] == "rationalize":
            rationalize(p, event[1])
        elif event[0] == "close":
            for _ in range(event[1]):
                closure_step(p)
        else:
            raise ValueError(f"unknown stage event {event[0]!r}")
    for _ in range(closures):
        closure_step(p)
    p.stage += 1
    return p


# ---------------------------------------------------------------------------
# dump / load / verify
# ---------------------------------------------------------------------------


def dump(p: Presentation) -> str:
    """Deterministic text form; the facts section is prefix-monotone in time."""
    lines = [
        "presentation v1",
        f"policy {p.policy}",
        f"stage {p.stage}",
        f"domain {p.domain_size}",
    ]
    lines.extend(fact.line() for fact in p.facts)
    for label, index in p.ledger.items():
        lines.append(f"label {label} {index} {p._ledger_role(label)}")
    for index in range(p.domain_size):
        element = p.interpretation.get(index)
        if element is not None:
            lines.append(f"# interp {index} {element_to_text(element)}")
    return "\n".join(lines) + "\n"


def _int_token(line_no: int, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line_no, f"{what} must be an integer, got {token!r}") from None


def _parse_role(line_no: int, role: str):
    """Decode a ledger role descriptor into a (kind, payload) pair."""
    if role == "transcendental":
        return "transcendental", None
    if role.startswith("radical q="):
        return "radical", _int_token(line_no, role[len("radical q="):], "exponent")
    if role.startswith("rationalized a="):
        body = role[len("rationalized a="):]
        num, sep, den = body.partition("/")
        if not sep:
            raise ParseError(line_no, f"rationalized role needs p/q, got {role!r}")
        return "rationalized", Fraction(
            _int_token(line_no, num, "numerator"), _int_token(line_no, den, "denominator")
        )
    raise ParseError(line_no, f"unknown ledger role {role!r}")


def load(text: str) -> Presentation:
    """Rebuild a presentation from its dump.

    Facts, ledger, and stage always come back; the interpretation comes back
    when the dump carries the debug section (dumps written by this module
    always do).  Radical radicands are reconstructed from the adjacent ledger
    line: a radical's partner is the generator declared immediately before
    it, whether still transcendental or already rationalized.
    """
    lines = text.splitlines()
    if len(lines) < 4:
        raise ParseError(len(lines) + 1, "dump ends inside the header")
    if lines[0] != "presentation v1":
        raise ParseError(1, f"expected 'presentation v1', got {lines[0]!r}")
    policy_parts = lines[1].split()
    if len(policy_parts) != 2 or policy_parts[0] != "policy":
        raise ParseError(2, f"expected 'policy <name>', got {lines[1]!r}")
    if policy_parts[1] not in (PAPER, TOY):
        raise ParseError(2, f"unknown prime policy {policy_parts[1]!r}")
    stage_parts = lines[2].split()
    if len(stage_parts) != 2 or stage_parts[0] != "stage":
        raise ParseError(3, f"expected 'stage <s>', got {lines[2]!r}")
    domain_parts = lines[3].split()
    if len(domain_parts) != 2 or domain_parts[0] != "domain":
        raise ParseError(4, f"expected 'domain <n>', got {lines[3]!r}")

    p = Presentation(policy_parts[1])
    p.stage = _int_token(3, stage_parts[1], "stage")
    domain = _int_token(4, domain_parts[1], "domain size")

    facts = []
    ledger_rows = []
    interp_rows = []
    for line_no, raw in enumerate(lines[4:], 5):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] in ("add", "mul"):
            if len(parts) != 4:
                raise ParseError(line_no, f"fact line needs 3 indices: {line!r}")
            a, b, c = (_int_token(line_no, t, "index") for t in parts[1:])
            for index in (a, b, c):
                if not 0 <= index < domain:
                    raise ParseError(
                        line_no, f"index {index} outside domain of size {domain}"
                    )
            if ledger_rows:
                raise ParseError(line_no, "fact line after the ledger section")
            facts.append(Fact(parts[0], a, b, c))
        elif parts[0] == "label":
            if len(parts) < 4:
                raise ParseError(line_no, f"ledger line too short: {line!r}")
            index = _int_token(line_no, parts[2], "index")
            if not 0 <= index < domain:
                raise ParseError(
                    line_no, f"index {index} outside domain of size {domain}"
                )
            ledger_rows.append((line_no, parts[1], index, " ".join(parts[3:])))
        elif parts[0] == "#":
            if len(parts) >= 3 and parts[1] == "interp":
                row = line.split(maxsplit=3)
                if len(row) != 4:
                    raise ParseError(line_no, f"interp line needs an expression: {line!r}")
                interp_rows.append((line_no, _int_token(line_no, row[2], "index"), row[3]))
            # other comment lines are ignored
        else:
            raise ParseError(line_no, f"unrecognized dump line {line!r}")

    previous = None  # (kind, payload) of the previous ledger generator
    for line_no, name, index, role_text in ledger_rows:
        kind, payload = _parse_role(line_no, role_text)
        if name in p.ledger:
            raise ParseError(line_no, f"label {name!r} declared twice")
        p.ledger[name] = index
        if kind == "transcendental":
            p.tower = p.tower.adjoin_transcendental(name)
            previous = ("transcendental", name)
        elif kind == "rationalized":
            p.rationalized[name] = payload
            previous = ("rationalized", payload)
        else:  # radical
            if previous is None:
                raise ParseError(line_no, f"radical {name!r} has no partner generator")
            pkind, pval = previous
            if pkind == "transcendental":
                base = p.tower.gen(pval)
            else:
                base = p.tower.rational(pval)
            radicand = p.tower.one() - base ** payload
            p.tower = p.tower.adjoin_radical(name, payload, radicand)
            previous = None

    p.domain_size = domain
    p.facts = facts
    p._covered = {(f.kind, f.a, f.b) for f in facts}
    for line_no, index, expr in interp_rows:
        if not 0 <= index < domain:
            raise ParseError(line_no, f"index {index} outside domain of size {domain}")
        try:
            element = text_to_element(p.tower, expr)
        except ValueError as exc:
            raise ParseError(line_no, f"bad interpretation expression: {exc}") from None
        p.interpretation[index] = element
    p._index_of = {el: i for i, el in p.interpretation.items()}
    return p


def _fact_lines(text: str) -> list:
    """The fact lines of a dump, in order."""
    out = []
    for raw in text.splitlines()[4:]:
        parts = raw.split()
        if parts and parts[0] in ("add", "mul"):
            out.append(raw.strip())
    return out


def verify(target, earlier: str | None = None) -> list:
    """Check the presentation invariants; returns a list of violations.

    Checks: (a) every fact holds under the interpretation, (b) the
    interpretation is injective, (c) the facts section extends the supplied
    earlier dump as a prefix, (d) every ledgered curve pair satisfies its
    defining relation x**q + y**q = 1.  An empty list means all checks pass.
    """
    p = load(target) if isinstance(target, str) else target
    violations = []

    missing = [i for i in range(p.domain_size) if i not in p.interpretation]
    for index in missing:
        violations.append(f"interpretation: index {index} has no expression")

    for n, fact in enumerate(p.facts):
        if fact.a in p.interpretation and fact.b in p.interpretation:
            left, right = p.interpretation[fact.a], p.interpretation[fact.b]
            got = left + right if fact.kind == "add" else left * right
            want = p.interpretation.get(fact.c)
            if got != want:
                violations.append(f"fact {n}: {fact.line()} does not hold")

    seen: dict = {}
    for index in sorted(p.interpretation):
        element = p.interpretation[index]
        if element in seen:
            violations.append(
                f"injectivity: indices {seen[element]} and {index} share a value"
            )
        else:
            seen[element] = index

    if earlier is not None:
        ours, theirs = _fact_lines(dump(p)), _fact_lines(earlier)
        if ours[: len(theirs)] != theirs:
            violations.append("prefix: facts do not extend the earlier dump")

    items = list(p.ledger.items())
    for pos, (label, index) in enumerate(items):
        if label not in p.tower.rad_labels:
            continue
        q = p.tower.rad_qs[p.tower.rad_labels.index(label)]
        if pos == 0:
            violations.append(f"curve: radical {label!r} has no partner")
            continue
        partner_idx = items[pos - 1][1]
        x_val = p.interpretation.get(partner_idx)
        y_val = p.interpretation.get(index)
        if x_val is None or y_val is None:
            continue
        if x_val ** q + y_val ** q != p.tower.one():
            violations.append(f"curve: pair ending at {label!r} breaks its relation")
    return violations
