"""Staged presentation growth: facts, closure, rationalization, dumps."""

from fractions import Fraction

import pytest

from towerfield.curves import evaluate_curve
from towerfield.errors import DuplicateLabel, NotTranscendental, ParseError, UnknownLabel
from towerfield.presentation import (
    Fact,
    adjoin_curve_pair,
    advance_stage,
    closure_step,
    dump,
    load,
    new_presentation,
    rationalize,
    verify,
)


def fact_keys(p):
    return {(f.kind, f.a, f.b) for f in p.facts}


class TestNewPresentation:
    def test_seed_domain_and_facts(self):
        p = new_presentation("toy")
        assert p.domain_size == 2
        assert Fact("mul", 1, 1, 1) in p.facts
        assert p.interpretation[0] == p.tower.zero()
        assert p.interpretation[1] == p.tower.one()
        assert p.ledger == {"zero": 0, "one": 1}

    def test_deterministic_dumps(self):
        assert dump(new_presentation("toy")) == dump(new_presentation("toy"))
        assert dump(new_presentation("paper")) != dump(new_presentation("toy"))

    def test_unknown_policy(self):
        with pytest.raises(ValueError, match="policy"):
            new_presentation("weekly")


class TestAdjoin:
    def test_pair_satisfies_curve(self):
        p = new_presentation("toy")
        ix, iy = adjoin_curve_pair(p, 0, "x0", "y0")
        assert ix != iy and {ix, iy}.isdisjoint({0, 1})
        value = evaluate_curve(0, p.interpretation[ix], p.interpretation[iy], "toy")
        assert value.is_zero, "adjoined pair must lie on its curve"

    def test_relation_lands_in_diagram(self):
        p = new_presentation("toy")
        ix, iy = adjoin_curve_pair(p, 0, "x0", "y0")
        sums = [f for f in p.facts if f.kind == "add" and f.c == 1]
        assert sums, "x**5 + y**5 must be recorded as summing to one"
        add = sums[-1]
        x5 = p.interpretation[ix] ** 5
        assert p.interpretation[add.a] == x5, "left summand is x**5"

    def test_two_curves_are_independent(self):
        p = new_presentation("toy")
        ix0, iy0 = adjoin_curve_pair(p, 0, "x0", "y0")
        ix1, iy1 = adjoin_curve_pair(p, 0, "a", "b")
        assert len({ix0, iy0, ix1, iy1}) == 4
        assert p.tower.trans_labels == ("x0", "a")

    def test_duplicate_label(self):
        p = new_presentation("toy")
        adjoin_curve_pair(p, 0, "x0", "y0")
        with pytest.raises(DuplicateLabel, match="x0"):
            adjoin_curve_pair(p, 1, "x0", "y9")
        with pytest.raises(DuplicateLabel):
            adjoin_curve_pair(p, 1, "t", "t")


class TestRationalize:
    def test_first_candidate_on_fresh_pair(self):
        p = new_presentation("toy")
        adjoin_curve_pair(p, 0, "x0", "y0")
        assert rationalize(p, "x0") == 2
        radicand = p.tower.generators[0].radicand
        assert radicand == radicand.tower.rational(Fraction(-31)), (
            "radicand must become 1 - 2**5 = -31"
        )
        assert verify(p) == []

    def test_twice_is_rejected(self):
        p = new_presentation("toy")
        adjoin_curve_pair(p, 0, "x0", "y0")
        rationalize(p, "x0")
        with pytest.raises(NotTranscendental, match="x0"):
            rationalize(p, "x0")
        with pytest.raises(NotTranscendental, match="y0"):
            rationalize(p, "y0")
        with pytest.raises(UnknownLabel):
            rationalize(p, "x9")

    def test_collision_and_singularity_skip_candidates(self):
        p = new_presentation("toy")
        adjoin_curve_pair(p, 0, "x0", "y0")
        x = p.tower.gen("x0")
        two, three = p.tower.rational(2), p.tower.rational(3)
        p._allocate((x - two) / (x - three))
        # x = 2 sends the planted element to 0 (collides with index 0);
        # x = 3 blows up its denominator; x = 4 sends it to 2, fresh here.
        assert rationalize(p, "x0") == 4
        assert verify(p) == []

    def test_facts_survive_rationalization(self):
        p = new_presentation("toy")
        adjoin_curve_pair(p, 0, "x0", "y0")
        for _ in range(20):
            closure_step(p)
        before = list(p.facts)
        rationalize(p, "x0")
        assert p.facts == before, "rationalization must not touch recorded facts"
        assert verify(p) == []


class TestClosure:
    def test_first_step_records_zero_sum(self):
        p = new_presentation("toy")
        closure_step(p)
        assert p.facts[-1] == Fact("add", 0, 0, 0)
        assert p.domain_size == 2, "0 + 0 collides with an existing index"

    def test_new_element_and_collision(self):
        p = new_presentation("toy")
        ix, _ = adjoin_curve_pair(p, 0, "x0", "y0")
        assert ix == 2
        for _ in range(12):
            closure_step(p)
        assert Fact("mul", 1, 2, 2) in p.facts, "x * 1 collides with x's own index"
        added = [f for f in p.facts if f.kind == "add" and (f.a, f.b) == (1, 2)]
        assert added and p.interpretation[added[0].c] == p.interpretation[
            1
        ] + p.interpretation[2], "1 + x gets its own index"
        assert added[0].c not in (1, 2)

    def test_covered_requests_are_skipped(self):
        p = new_presentation("toy")
        for _ in range(8):
            closure_step(p)
        keys = [(f.kind, f.a, f.b) for f in p.facts]
        assert len(keys) == len(set(keys)), "no request is recorded twice"

    def test_fairness_bounded(self):
        p = new_presentation("toy")
        adjoin_curve_pair(p, 0, "x0", "y0")
        n = p.domain_size
        for _ in range(4 * n * n):
            closure_step(p)
        covered = fact_keys(p)
        for a in range(n):
            for b in range(n):
                for op in ("add", "mul"):
                    assert (op, a, b) in covered, f"request {op}({a}, {b}) never served"


class TestStages:
    def test_empty_events(self):
        p = new_presentation("toy")
        facts_before = len(p.facts)
        advance_stage(p)
        assert p.stage == 1
        assert len(p.facts) == facts_before + 1

    def test_thirty_quiet_stages_stay_small(self):
        p = new_presentation("toy")
        for _ in range(30):
            advance_stage(p)
        assert p.stage == 30
        assert p.domain_size <= 2 + 30, "one closure element at most per stage"

    def test_adjoin_event_matches_direct_call(self):
        p = new_presentation("toy")
        advance_stage(p, [("adjoin", 0, "x0", "y0")])
        q = new_presentation("toy")
        adjoin_curve_pair(q, 0, "x0", "y0")
        closure_step(q)
        q.stage += 1
        assert dump(p) == dump(q)

    def test_close_event_adds_extra_steps(self):
        p = new_presentation("toy")
        advance_stage(p, [("close", 5)])
        assert len(p.facts) == 1 + 6

    def test_unknown_event(self):
        p = new_presentation("toy")
        with pytest.raises(ValueError, match="unknown stage event"):
            advance_stage(p, [("paint", 3)])


class TestDumpLoad:
    def build(self):
        p = new_presentation("toy")
        advance_stage(p, [("adjoin", 0, "x0", "y0")])
        advance_stage(p, [("rationalize", "x0")])
        advance_stage(p, [("adjoin", 1, "x1", "y1"), ("close", 3)])
        return p

    def test_roundtrip(self):
        p = self.build()
        text = dump(p)
        q = load(text)
        assert q.facts == p.facts
        assert q.ledger == p.ledger
        assert q.stage == p.stage
        assert q.rationalized == p.rationalized
        assert dump(q) == text
        assert verify(q) == []

    def test_loaded_presentation_continues_identically(self):
        p = self.build()
        q = load(dump(p))
        advance_stage(p)
        advance_stage(q)
        assert dump(p) == dump(q)

    def test_prefix_property_across_stages(self):
        p = new_presentation("toy")
        snapshots = [dump(p)]
        events = [[("adjoin", 0, "x0", "y0")], [], [("rationalize", "x0")], [], []]
        for ev in events:
            advance_stage(p, ev)
            snapshots.append(dump(p))
        for earlier, later in zip(snapshots, snapshots[1:]):
            assert verify(later, earlier=earlier) == []

    def test_header_errors(self):
        with pytest.raises(ParseError, match="line 1"):
            load("diagram v1\npolicy toy\nstage 0\ndomain 2\n")
        with pytest.raises(ParseError, match="line 2: unknown prime policy"):
            load("presentation v1\npolicy weekly\nstage 0\ndomain 2\n")
        with pytest.raises(ParseError, match="header"):
            load("presentation v1\n")

    def test_fact_line_errors(self):
        base = "presentation v1\npolicy toy\nstage 0\ndomain 2\n"
        with pytest.raises(ParseError, match="line 5: index 7"):
            load(base + "add 0 7 1\n")
        with pytest.raises(ParseError, match="line 5: .*integer"):
            load(base + "add 0 x 1\n")
        with pytest.raises(ParseError, match="line 5: unrecognized"):
            load(base + "sub 0 1 1\n")
        with pytest.raises(ParseError, match="line 7: fact line after"):
            load(base + "mul 1 1 1\nlabel zero 0 rationalized a=0/1\nadd 0 0 0\n")

    def test_ledger_errors(self):
        base = "presentation v1\npolicy toy\nstage 0\ndomain 3\n"
        with pytest.raises(ParseError, match="unknown ledger role"):
            load(base + "label x0 2 imaginary\n")
        with pytest.raises(ParseError, match="declared twice"):
            load(
                base
                + "label zero 0 rationalized a=0/1\nlabel zero 1 rationalized a=0/1\n"
            )
        with pytest.raises(ParseError, match="no partner"):
            load(base + "label y0 2 radical q=5\n")

    def test_interp_errors(self):
        base = "presentation v1\npolicy toy\nstage 0\ndomain 2\n"
        with pytest.raises(ParseError, match="line 5: bad interpretation"):
            load(base + "# interp 0 ]]]\n")

    def test_bare_load_cannot_advance(self):
        text = (
            "presentation v1\npolicy toy\nstage 0\ndomain 2\n"
            "mul 1 1 1\n"
            "label zero 0 rationalized a=0/1\nlabel one 1 rationalized a=1/1\n"
        )
        p = load(text)
        assert p.facts == [Fact("mul", 1, 1, 1)]
        with pytest.raises(ValueError, match="interpretation"):
            closure_step(p)


class TestVerify:
    def test_clean_build(self):
        p = new_presentation("toy")
        for _ in range(5):
            advance_stage(p, [("close", 2)])
        assert verify(p) == []
        assert verify(dump(p)) == []

    def test_corrupt_fact_reported(self):
        p = new_presentation("toy")
        adjoin_curve_pair(p, 0, "x0", "y0")
        p.facts[0] = Fact("mul", 1, 1, 0)
        problems = verify(p)
        assert any(v.startswith("fact 0:") for v in problems), problems

    def test_injectivity_violation_reported(self):
        p = new_presentation("toy")
        adjoin_curve_pair(p, 0, "x0", "y0")
        p.interpretation[3] = p.interpretation[2]
        problems = verify(p)
        assert any("injectivity" in v for v in problems), problems

    def test_curve_violation_reported(self):
        p = new_presentation("toy")
        ix, _ = adjoin_curve_pair(p, 0, "x0", "y0")
        p.interpretation[ix] = p.tower.rational(7)
        problems = verify(p)
        assert any(v.startswith("curve:") for v in problems), problems

    def test_non_extension_reported(self):
        p = new_presentation("toy")
        advance_stage(p)
        early = dump(p)
        q = new_presentation("toy")
        closure_step(q)
        q.facts[-1] = Fact("mul", 0, 1, 0)
        assert any("prefix" in v for v in verify(q, earlier=early))


class TestSoundnessProperty:
    def test_random_build_scripts_stay_sound(self, rng):
        for _ in range(3):
            p = new_presentation("toy")
            curve, snapshots = 0, [dump(p)]
            pending_x = []
            for _ in range(8):
                roll = rng.random()
                if roll < 0.4:
                    lx, ly = f"x{curve}", f"y{curve}"
                    advance_stage(p, [("adjoin", min(curve, 2), lx, ly)])
                    pending_x.append(lx)
                    curve += 1
                elif roll < 0.6 and pending_x:
                    advance_stage(p, [("rationalize", pending_x.pop(0))])
                else:
                    advance_stage(p, [("close", rng.randint(1, 4))])
                snapshots.append(dump(p))
            assert verify(p) == []
            for earlier, later in zip(snapshots, snapshots[1:]):
                assert verify(later, earlier=earlier) == []
            assert dump(load(dump(p))) == dump(p)
