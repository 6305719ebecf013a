"""End-to-end checks over the whole feature surface.

One test per numbered criterion; after the run the terminal summary
prints a PASS/FAIL line for each (hook in conftest).  Everything is
exact Fraction arithmetic; the stopwatch bounds are generous wall-time
ceilings, not benchmarks.
"""

import random
import time
from fractions import Fraction

from dsregret import (
    BudgetExceeded,
    Digraph,
    ResolutionStrategy,
    antag_value,
    aval_gadget,
    discounted_sum,
    epsilon_gap,
    eval_strategy_regret,
    gen_2dp,
    gen_sat,
    horizon_for_gap,
    oracle_interval_positional,
    oracle_interval_word,
    parse_rational,
    regret_all,
    regret_lower_bound,
    regret_positional,
    strategy_regret_word,
    synth_otp,
    value_table,
    zero_regret_all,
    zero_regret_positional,
    zero_regret_word,
)
from dsregret.regret_word import _subset_layers

import oracles
from conftest import random_arena, random_automaton, random_gap_automaton

BIGMEM_REGRET = Fraction(10) - 10 * Fraction(9, 10) ** 44


def full_resolution(aut, overrides):
    choice = {}
    for q in range(aut.n):
        for a in aut.alphabet:
            moves = aut.moves(q, a)
            key = (aut.states[q], a)
            if key in overrides:
                choice[(q, a)] = aut.index[overrides[key]]
            else:
                assert len(moves) == 1, key
                choice[(q, a)] = moves[0][0]
    return ResolutionStrategy(choice)


def adam_profiles(arena) -> int:
    count = 1
    for u in range(arena.n):
        if not arena.eve[u]:
            count *= len(arena.succ[u])
    return count


def test_criterion_1_bigmem_reproduction(bigmem):
    started = time.monotonic()
    rep = regret_all(bigmem)
    assert rep.value == BIGMEM_REGRET
    assert rep.horizon == 71
    assert regret_lower_bound(bigmem) == Fraction(124659, 100000)
    assert zero_regret_all(bigmem).zero is False

    otp = synth_otp(bigmem, BIGMEM_REGRET)
    ix = bigmem.index
    # the probed vertex recurs every second step; count actual probes
    probes = [
        d for d in range(0, otp.probe_horizon(), 2)
        if otp.choice(ix["v_I"], d) == otp.optimistic[ix["v_I"]]
    ]
    assert len(probes) == 22
    assert otp.choice(ix["v_I"], 44) == otp.pessimistic[ix["v_I"]]
    assert eval_strategy_regret(bigmem, otp) == BIGMEM_REGRET
    assert time.monotonic() - started < 10


def test_criterion_2_investment_reproduction(investment):
    started = time.monotonic()
    lam = investment.discount
    plans = {
        "SS": {("q_init", "#"): "q_S", ("q_S", "H"): "q_S2", ("q_S", "L"): "q_S2"},
        "SB": {("q_init", "#"): "q_S", ("q_S", "H"): "q_B2", ("q_S", "L"): "q_B2"},
        "BB": {("q_init", "#"): "q_B", ("q_S", "H"): "q_S2", ("q_S", "L"): "q_S2"},
    }
    regrets = {
        name: strategy_regret_word(investment, full_resolution(investment, ov))
        for name, ov in plans.items()
    }
    assert regrets == {
        "SS": Fraction(4851, 1250),
        "SB": Fraction(2401, 625),
        "BB": Fraction(4851, 625),
    }

    # replay each plan against each market on the automaton itself
    rewards = {"S": {"H": Fraction(-4), "L": Fraction(12)},
               "B": {"H": Fraction(-2), "L": Fraction(8)}}
    cells = {}
    for name, overrides in plans.items():
        res = full_resolution(investment, overrides)
        for market in ("HH", "HL", "LH", "LL"):
            q, weights = investment.initial, []
            for symbol in ("#", market[0], market[1]):
                t = res.choice[(q, symbol)]
                weights.append(investment.weight(q, symbol, t))
                q = t
            cells[(name, market)] = discounted_sum(weights, lam)
            hand = discounted_sum(
                [Fraction(0),
                 rewards[name[0]][market[0]],
                 rewards[name[1]][market[1]]],
                lam,
            )
            assert cells[(name, market)] == hand
    assert len(cells) == 12
    assert cells[("SS", "HH")] == -Fraction(4851, 625)
    assert cells[("SB", "LL")] == Fraction(12152, 625)

    assert oracle_interval_word(investment, 4) == (
        Fraction(2401, 625), Fraction(2401, 625),
    )
    assert zero_regret_word(investment) == (False, None)
    assert time.monotonic() - started < 5


def test_criterion_3_wrapper_identity():
    started = time.monotonic()
    rng = random.Random(301)
    for _ in range(100):
        arena = random_arena(rng, max_n=6, max_w=5)
        inst = aval_gadget(arena)
        k = arena.max_weight / (1 - arena.discount)
        aval = antag_value(arena)[arena.initial]
        want = arena.discount * (k + 1 - aval)
        assert parse_rational(inst.expected["regret_all"]) == want
        assert regret_all(inst.artifact).value == want
    assert time.monotonic() - started < 300


def test_criterion_4_positional_suite(bigmem):
    started = time.monotonic()
    assert regret_positional(bigmem).value == Fraction(19, 10)

    rng = random.Random(401)
    checked = 0
    while checked < 25:
        arena = random_arena(rng, max_n=5)
        if adam_profiles(arena) > 8:
            continue
        try:
            pos = regret_positional(arena, budget=1_500_000).value
            all_ = regret_all(arena, budget=1_500_000).value
        except BudgetExceeded:
            continue
        assert pos <= all_
        lo, hi = oracle_interval_positional(arena, 6)
        assert lo <= pos <= hi
        assert zero_regret_positional(arena).zero == (pos == 0)
        checked += 1
    assert time.monotonic() - started < 600


def test_criterion_5_reduction_round_trips():
    started = time.monotonic()
    rng = random.Random(501)
    lam, r = Fraction(1, 2), Fraction(3)

    graphs = 0
    while graphs < 50:
        n = rng.randint(4, 8)
        arcs = sorted({
            (rng.randint(1, n), rng.randint(1, n))
            for _ in range(rng.randint(n, 2 * n))
        })
        s1, t1, s2, t2 = rng.sample(range(1, n + 1), 4)
        try:
            inst = gen_2dp(Digraph(n, tuple(arcs)), s1, t1, s2, t2, lam, r)
        except ValueError:
            continue
        disjoint = oracles.brute_disjoint_paths(n, arcs, s1, t1, s2, t2)
        assert inst.expected["zero_regret_positional"] == (not disjoint)
        assert zero_regret_positional(inst.artifact).zero == (not disjoint)
        graphs += 1

    formulas = 0
    while formulas < 50:
        nvars = rng.randint(3, 4)
        cnf = [
            tuple(rng.choice([-1, 1]) * x for x in rng.sample(range(1, nvars + 1), 3))
            for _ in range(rng.randint(1, 6))
        ]
        sat = oracles.brute_sat(cnf)
        # the word solver certifies assignments whose witness literals
        # survive every audit; sample formulas where that is no loss
        if oracles.stable_witness(cnf) != sat:
            continue
        inst = gen_sat(cnf)
        assert inst.expected["zero_regret_word"] == sat
        try:
            zero, _ = zero_regret_word(inst.artifact, budget=1_000_000)
        except BudgetExceeded:
            continue
        assert zero == sat
        formulas += 1
    assert time.monotonic() - started < 600


def test_criterion_6_gap_promise():
    rng = random.Random(601)
    eps = Fraction(1, 2)
    for _ in range(100):
        aut = random_gap_automaton(rng)
        lo, hi = oracle_interval_word(aut, aut.n + 1)
        assert lo == hi
        regret = lo
        yes = epsilon_gap(aut, regret, eps)
        assert yes.answer and regret <= regret + eps
        no = epsilon_gap(aut, regret - eps - Fraction(1, 8), eps)
        assert not no.answer and regret > regret - eps - Fraction(1, 8)


def test_criterion_7_property_suites():
    rng = random.Random(701)

    # Bellman residuals vanish and aVal never beats cVal
    for _ in range(40):
        arena = random_arena(rng)
        vt = value_table(arena)
        lam = arena.discount
        for v in range(arena.n):
            offers = [w + lam * vt.aval[t] for t, w in arena.succ[v]]
            assert vt.aval[v] == (max(offers) if arena.eve[v] else min(offers))
            assert vt.cval[v] == max(w + lam * vt.cval[t] for t, w in arena.succ[v])
            assert vt.aval[v] <= vt.cval[v]

    # strategy improvement equals profile enumeration on small arenas
    checked = 0
    while checked < 25:
        arena = random_arena(rng, max_n=4)
        try:
            per_vertex = [
                (oracles.oracle_aval(arena, v), oracles.oracle_cval(arena, v))
                for v in range(arena.n)
            ]
        except ValueError:
            continue
        vt = value_table(arena)
        assert all(
            vt.aval[v] == a and vt.cval[v] == c
            for v, (a, c) in enumerate(per_vertex)
        )
        checked += 1

    # the margin solver equals the naive recursion at shallow horizons
    checked = 0
    while checked < 20:
        arena = random_arena(rng, max_n=4)
        vt = value_table(arena)
        if zero_regret_all(arena, vt).zero:
            continue
        try:
            oracles.oracle_cval(arena)
        except ValueError:
            continue
        gap = regret_lower_bound(arena, vt)
        horizon = horizon_for_gap(gap, arena.max_weight, arena.discount)
        if horizon > 8:
            continue
        assert regret_all(arena).value == oracles.oracle_regret_all(arena, horizon)
        checked += 1

    # the advantage-set update equals exhaustive run enumeration
    for _ in range(12):
        aut = random_automaton(rng, max_n=3, lam=Fraction(1, 2))
        for length in range(1, 7):
            layers, _ = _subset_layers(aut, length, budget=10**6)
            assert set(layers[length]) == oracles.brute_advantage_states(aut, length)
