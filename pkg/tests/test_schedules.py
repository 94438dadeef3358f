"""Schedule, chip-table, and convergence-row semantics."""

import pytest

from towerfield.errors import InconsistentSpec, ParseError
from towerfield.schedules import (
    ChipSpec,
    EnumerationSchedule,
    PhiTable,
    chips_to_text,
    join_spec,
    member_at,
    parse_chips,
    parse_phi,
    parse_schedule,
    phi_to_text,
    schedule_to_text,
    stable_use,
    true_stability,
)


def random_schedule(rng, horizon=12, universe=10, quiet_tail=0):
    """Random schedule; entries confined to the first horizon - quiet_tail stages."""
    top = horizon - quiet_tail
    pairs = tuple(
        (n, rng.randint(0, top))
        for n in range(universe)
        if rng.random() < 0.6
    )
    return EnumerationSchedule(pairs, horizon)


class TestEnumerationSchedule:
    def test_membership_threshold(self):
        c = EnumerationSchedule(((1, 3),), horizon=6)
        assert not member_at(c, 1, 2), "element must be absent before its stage"
        assert member_at(c, 1, 3), "element must be present from its stage on"
        assert member_at(c, 1, 6)

    def test_unscheduled_element_never_enters(self):
        c = EnumerationSchedule(((1, 3),), horizon=6)
        assert all(not member_at(c, 7, s) for s in range(7))

    def test_membership_monotone(self, rng):
        for _ in range(50):
            c = random_schedule(rng)
            for n in range(10):
                for s in range(c.horizon):
                    assert not (
                        member_at(c, n, s) and not member_at(c, n, s + 1)
                    ), f"membership of {n} dropped between stages {s} and {s + 1}"

    def test_duplicate_element_rejected(self):
        with pytest.raises(ValueError, match="scheduled twice"):
            EnumerationSchedule(((2, 1), (2, 5)), horizon=6)

    def test_entry_beyond_horizon_rejected(self):
        with pytest.raises(ValueError, match="exceeds horizon"):
            EnumerationSchedule(((2, 9),), horizon=6)

    def test_members(self):
        c = EnumerationSchedule(((4, 0), (1, 3)), horizon=3)
        assert c.members() == {1, 4}
        assert c.entry_stage(4) == 0
        assert c.entry_stage(9) is None


class TestChipSpec:
    def test_values_enter_tail_cycle(self):
        spec = ChipSpec(chips=(5, 7), tail_cycle=(1, 2))
        assert [spec.value_at(s) for s in range(6)] == [5, 7, 1, 2, 1, 2]
        assert spec.horizon == 1
        assert spec.infinite_hits() == {1, 2}

    def test_encoded_membership(self):
        spec = ChipSpec(chips=(5, 7), tail_cycle=(1, 2))
        assert spec.encoded_member(5) and spec.encoded_member(7)
        assert not spec.encoded_member(1) and not spec.encoded_member(2)
        assert spec.encoded_member(9), "a value never hit has finite preimage"

    def test_empty_tail_rejected(self):
        with pytest.raises(ValueError, match="tail cycle"):
            ChipSpec(chips=(1,), tail_cycle=())

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError, match="stage 0"):
            ChipSpec(chips=(), tail_cycle=(1,))

    def test_negative_value_rejected(self):
        with pytest.raises(ValueError, match=">= 0"):
            ChipSpec(chips=(3, -1), tail_cycle=(0,))


class TestStability:
    def test_surviving_restraint_returns_use(self):
        phi = PhiTable(((0, 4, 3),))
        d = EnumerationSchedule(((5, 2),), horizon=8)
        assert stable_use(phi, d, 0, 4) == 3

    def test_injury_below_use_suppresses(self):
        phi = PhiTable(((0, 4, 3),))
        d = EnumerationSchedule(((1, 5),), horizon=8)
        assert stable_use(phi, d, 0, 4) is None, "element 1 < use 3 enters at stage 5"

    def test_missing_row_gives_nothing(self):
        phi = PhiTable(((0, 4, 3),))
        d = EnumerationSchedule((), horizon=8)
        assert stable_use(phi, d, 1, 4) is None
        assert stable_use(phi, d, 0, 5) is None

    def test_change_at_or_above_use_is_harmless(self):
        phi = PhiTable(((0, 4, 3),))
        d = EnumerationSchedule(((3, 5), (8, 5)), horizon=8)
        assert stable_use(phi, d, 0, 4) == 3

    def test_true_stability_skips_injured_row(self):
        phi = PhiTable(((0, 2, 4), (0, 6, 4)))
        d = EnumerationSchedule(((1, 4),), horizon=9)
        assert true_stability(phi, d, 0) == (6, 4), (
            "entry 1 at stage 4 invalidates the stage-2 row; the stage-6 row is final"
        )

    def test_true_stability_none_when_all_rows_injured(self):
        phi = PhiTable(((0, 2, 4),))
        d = EnumerationSchedule(((1, 4), (0, 9)), horizon=9)
        assert true_stability(phi, d, 0) is None

    def test_true_stability_prefers_least_stage(self):
        phi = PhiTable(((0, 1, 2), (0, 5, 2)))
        d = EnumerationSchedule(((7, 3),), horizon=9)
        assert true_stability(phi, d, 0) == (1, 2)

    def test_horizon_stability_agrees_when_quiesced(self, rng):
        for _ in range(40):
            d = random_schedule(rng, horizon=12, quiet_tail=4)
            u = rng.randint(1, 8)
            settled = max(
                (t for n, t in d.entries if n < u), default=0
            )
            rows = tuple((0, s, u) for s in range(settled, d.horizon + 1))
            phi = PhiTable(rows)
            at_horizon = stable_use(phi, d, 0, d.horizon)
            final = true_stability(phi, d, 0)
            assert at_horizon == u, "nothing enters beyond the horizon"
            assert final == (settled, u), f"expected ({settled}, {u}), got {final}"


class TestJoin:
    def test_join_codes_members_even_witness_odd(self):
        c = EnumerationSchedule(((0, 1),), horizon=4)
        spec = join_spec(c, {1})
        probed = {m for m in range(4) if spec.encoded_member(m)}
        assert probed == {0, 3}, f"probed members {sorted(probed)}"

    def test_join_rejects_overlap(self):
        c = EnumerationSchedule(((2, 0),), horizon=4)
        with pytest.raises(InconsistentSpec, match="intersects"):
            join_spec(c, {2, 5})

    def test_join_of_empty_schedule(self):
        c = EnumerationSchedule((), horizon=2)
        spec = join_spec(c, {0, 1})
        probed = {m for m in range(4) if spec.encoded_member(m)}
        assert probed == {1, 3}

    def test_join_decides_both_directions(self, rng):
        for _ in range(40):
            c = random_schedule(rng, horizon=10, universe=8)
            witness = frozenset(
                n for n in range(8) if n not in c.members() and rng.random() < 0.7
            )
            spec = join_spec(c, witness)
            probe_max = max(
                [2 * n for n in c.members()] + [2 * n + 1 for n in witness],
                default=0,
            )
            for n in range(8):
                if 2 * n <= probe_max:
                    assert spec.encoded_member(2 * n) == member_at(c, n, c.horizon), (
                        f"even code for {n} disagrees with membership"
                    )
                if n in witness:
                    assert spec.encoded_member(2 * n + 1), f"odd code for witness {n}"
            for m in range(probe_max + 1):
                if spec.encoded_member(m):
                    if m % 2 == 0:
                        assert member_at(c, m // 2, c.horizon), (
                            f"code {m} encoded but {m // 2} is not a member"
                        )
                    else:
                        assert (m - 1) // 2 in witness, (
                            f"code {m} encoded but {(m - 1) // 2} is not witnessed"
                        )


class TestFormats:
    def test_schedule_roundtrip(self):
        c = EnumerationSchedule(((4, 0), (1, 3), (9, 2)), horizon=5)
        text = schedule_to_text(c)
        assert parse_schedule(text) == c
        assert "enter 1 at 3" in text and text.endswith("horizon 5\n")

    def test_schedule_comments_and_blanks_ignored(self):
        text = "# staged set\n\nenter 2 at 1\n\nhorizon 4\n"
        c = parse_schedule(text)
        assert c.entries == ((2, 1),) and c.horizon == 4

    def test_schedule_bad_integer(self):
        with pytest.raises(ParseError, match="line 1: element must be an integer"):
            parse_schedule("enter x at 3\n")

    def test_schedule_duplicate_entry_line(self):
        with pytest.raises(ParseError, match="line 2: element 4"):
            parse_schedule("enter 4 at 1\nenter 4 at 2\n")

    def test_schedule_unrecognized_line(self):
        with pytest.raises(ParseError, match="line 2: unrecognized"):
            parse_schedule("enter 4 at 1\nexit 4 at 2\n")

    def test_schedule_entry_past_declared_horizon(self):
        with pytest.raises(ParseError, match="line 1: entry stage 7 exceeds"):
            parse_schedule("enter 3 at 7\nhorizon 5\n")

    def test_schedule_default_horizon_is_last_stage(self):
        assert parse_schedule("enter 3 at 7\n").horizon == 7

    def test_chips_roundtrip(self):
        spec = ChipSpec(chips=(0, 3, 3), tail_cycle=(1, 2))
        text = chips_to_text(spec)
        assert parse_chips(text) == spec
        assert "tail cycle 1 2" in text

    def test_chips_gap_rejected(self):
        text = "chip 0 4\nchip 2 5\ntail cycle 1\n"
        with pytest.raises(ParseError, match="no value for stage 1"):
            parse_chips(text)

    def test_chips_missing_tail(self):
        with pytest.raises(ParseError, match="line 2: .*tail cycle"):
            parse_chips("chip 0 4\n")

    def test_chips_horizon_mismatch(self):
        text = "chip 0 4\ntail cycle 1\nhorizon 3\n"
        with pytest.raises(ParseError, match="declared horizon 3"):
            parse_chips(text)

    def test_chips_duplicate_stage(self):
        with pytest.raises(ParseError, match="line 2: stage 0 assigned twice"):
            parse_chips("chip 0 4\nchip 0 5\ntail cycle 1\n")

    def test_phi_roundtrip(self):
        phi = PhiTable(((0, 4, 3), (1, 2, 0), (0, 6, 3)))
        text = phi_to_text(phi)
        assert parse_phi(text) == phi
        assert "phi 0 at 4 use 3" in text

    def test_phi_duplicate_row(self):
        with pytest.raises(ParseError, match="line 2: duplicate row"):
            parse_phi("phi 0 at 4 use 3\nphi 0 at 4 use 5\n")

    def test_phi_unrecognized_line(self):
        with pytest.raises(ParseError, match="line 1: unrecognized phi line"):
            parse_phi("phi 0 at 4\n")

    def test_phi_negative_use_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            PhiTable(((0, 4, -1),))
