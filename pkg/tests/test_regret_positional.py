import random
from fractions import Fraction

import pytest

from dsregret import (
    BudgetExceeded,
    PlayPrefix,
    allowed_edges,
    horizon_nu,
    lower_bound_b,
    mrp_mrs,
    oracle_interval_positional,
    parse_arena,
    regret_all,
    regret_positional,
    zero_regret_all,
    zero_regret_positional,
)
from dsregret.regret_positional import (
    KnowledgeState,
    knowledge_bad_edge,
    value_denominator,
)

from conftest import random_arena

TOY = "lambda 1/2\neve a\nadam b\ninit a\nedge a b 1\nedge a a 0\nedge b b 0\n"


class TestKnowledge:
    def test_allowed_edges_shrink_with_the_prefix(self, bigmem):
        ix = bigmem.index
        full = frozenset((u, v) for u, v, _ in bigmem.edges())
        p0 = PlayPrefix.start(bigmem)
        assert allowed_edges(bigmem, p0) == full
        p = PlayPrefix.from_names(bigmem, ["v_I", "v", "v_I"])
        assert allowed_edges(bigmem, p) == full - {(ix["v"], ix["y"])}

    def test_inconsistent_prefix_rejected(self, bigmem):
        p = PlayPrefix.from_names(bigmem, ["v_I", "v", "v_I", "v", "y"])
        with pytest.raises(ValueError, match="not consistent"):
            allowed_edges(bigmem, p)

    def test_knowledge_bad_edge(self, bigmem):
        ix = bigmem.index
        fresh = KnowledgeState(ix["v_I"], frozenset())
        # with v unpinned, some adversary punishes either initial choice
        assert knowledge_bad_edge(bigmem, fresh, KnowledgeState(ix["x"], frozenset()))
        assert knowledge_bad_edge(bigmem, fresh, KnowledgeState(ix["v"], frozenset()))
        # once v is pinned home the conservative edge is safe, while
        # probing keeps conceding the spread between x and the v cycle
        pinned = frozenset({(ix["v"], ix["v_I"])})
        src = KnowledgeState(ix["v_I"], pinned)
        assert not knowledge_bad_edge(bigmem, src, KnowledgeState(ix["x"], pinned))
        assert knowledge_bad_edge(bigmem, src, KnowledgeState(ix["v"], pinned))

    def test_adam_source_rejected(self, bigmem):
        ix = bigmem.index
        with pytest.raises(ValueError, match="Eve"):
            knowledge_bad_edge(
                bigmem,
                KnowledgeState(ix["v"], frozenset()),
                KnowledgeState(ix["y"], frozenset()),
            )


class TestZeroRegret:
    def test_bigmem(self, bigmem):
        res = zero_regret_positional(bigmem)
        assert not res.zero
        assert not res
        assert res.states == 10
        assert res.witness.owner == "adam"

    def test_json_shape(self, bigmem):
        blob = zero_regret_positional(bigmem).to_json(bigmem)
        assert blob["zero_regret"] is False
        assert blob["winner"] == "adam"
        assert blob["states"] == 10
        assert all({"vertex", "allowed", "choice"} <= set(m) for m in blob["witness"]["moves"])

    def test_revealed_information_can_kill_regret(self):
        # the hub moves before Eve ever does, so a positional adversary
        # is fully pinned by the time she chooses; arbitrary adversaries
        # can still bait the return edge and switch behavior at the hub
        arena = parse_arena(
            "lambda 2/3\n"
            "eve e\nadam h\ninit h\n"
            "edge e e 1\n"
            "edge e h -1\n"
            "edge h e -2\n"
            "edge h h 3\n"
        )
        assert not zero_regret_all(arena).zero
        assert zero_regret_positional(arena).zero
        assert regret_positional(arena).value == 0
        assert regret_all(arena).value > 0


class TestBounds:
    def test_bigmem_lower_bound(self, bigmem):
        b = lower_bound_b(bigmem)
        lam = bigmem.discount
        assert b == lam ** (bigmem.n * (bigmem.edge_count() + 1)) * Fraction(19, 10)
        assert b == lam**28 * Fraction(19, 10)
        assert Fraction(0) < b <= regret_positional(bigmem).value

    def test_lower_bound_requires_regret(self):
        arena = parse_arena(
            "lambda 1/2\neve a\nadam b\ninit a\nedge a b 0\nedge a a 0\nedge b b 0\n"
        )
        with pytest.raises(ValueError, match="zero regret"):
            lower_bound_b(arena)

    def test_horizon_nu_small_case(self):
        toy = parse_arena(TOY)
        assert horizon_nu(toy, Fraction(1, 4)) == 15

    def test_horizon_nu_rejects_nonpositive(self, bigmem):
        with pytest.raises(ValueError):
            horizon_nu(bigmem, Fraction(0))

    def test_value_denominator_formula(self, bigmem):
        assert value_denominator(bigmem) == 10**4 * (10**4 - 9**4)


class TestMrpMrs:
    def test_pinned_prefix(self, bigmem):
        ix = bigmem.index
        p = PlayPrefix.from_names(bigmem, ["v_I", "v", "v_I", "x"])
        mrp, taus = mrp_mrs(bigmem, p)
        assert mrp == frozenset({0})
        assert len(taus) == 1
        # the only regret-witnessing adversary keeps v pinned home
        assert taus[0].choice[ix["v"]] == ix["v_I"]

    def test_no_deviation_yet(self, bigmem):
        mrp, taus = mrp_mrs(bigmem, PlayPrefix.start(bigmem))
        assert mrp == frozenset()
        # nothing is excluded: every positional adversary remains
        assert len(taus) == 2


class TestRegretPositional:
    def test_bigmem_value(self, bigmem):
        rep = regret_positional(bigmem)
        assert rep.value == Fraction(19, 10)
        assert rep.horizon == 2402
        assert rep.nodes == 8
        assert rep.witness is None
        assert rep.notes == ()

    def test_restriction_only_helps_eve(self, bigmem):
        assert regret_positional(bigmem).value <= regret_all(bigmem).value

    def test_restriction_only_helps_eve_randomly(self):
        rng = random.Random(51)
        checked = 0
        while checked < 8:
            arena = random_arena(rng, max_n=3, max_w=2)
            try:
                pos = regret_positional(arena, budget=200_000)
                full = regret_all(arena, budget=200_000)
            except BudgetExceeded:
                continue
            assert pos.value <= full.value
            checked += 1

    def test_zero_iff_value_zero(self):
        rng = random.Random(52)
        checked = 0
        while checked < 8:
            arena = random_arena(rng, max_n=3, max_w=2)
            try:
                rep = regret_positional(arena, budget=200_000)
            except BudgetExceeded:
                continue
            assert (rep.value == 0) == zero_regret_positional(arena).zero
            checked += 1

    def test_budget_carries_partial_interval(self, bigmem):
        with pytest.raises(BudgetExceeded) as info:
            regret_positional(bigmem, budget=4)
        lo, hi = info.value.partial["interval"]
        assert lo <= Fraction(19, 10) <= hi

    def test_report_json(self, bigmem):
        blob = regret_positional(bigmem).to_json(bigmem)
        assert blob["value"] == "19/10"
        assert blob["decimal"] == "1.9"
        assert blob["horizon"] == 2402
        assert blob["witness"] is None
        assert "notes" not in blob


class TestOracleInterval:
    def test_depth_eight_pinned(self, bigmem):
        assert oracle_interval_positional(bigmem, 8) == (
            Fraction(0),
            Fraction(43046721, 50000),
        )

    def test_deepening_nests_and_brackets(self, bigmem):
        i8 = oracle_interval_positional(bigmem, 8)
        i20 = oracle_interval_positional(bigmem, 20)
        assert i8[0] <= i20[0] <= i20[1] <= i8[1]
        value = regret_positional(bigmem).value
        assert i20[0] <= value <= i20[1]
        lam = bigmem.discount
        assert i20[1] - i20[0] <= 4 * bigmem.max_weight * lam**20 / (1 - lam)

    def test_depth_must_be_positive(self, bigmem):
        with pytest.raises(ValueError):
            oracle_interval_positional(bigmem, 0)

    def test_brackets_random_arenas(self):
        rng = random.Random(53)
        checked = 0
        while checked < 8:
            arena = random_arena(rng, max_n=3, max_w=2)
            try:
                rep = regret_positional(arena, budget=200_000)
            except BudgetExceeded:
                continue
            lo, hi = oracle_interval_positional(arena, 6)
            assert lo <= rep.value <= hi
            checked += 1
