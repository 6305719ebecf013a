from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsregret import (
    FormatError,
    LassoPlay,
    PlayPrefix,
    WeightedArena,
    WeightedAutomaton,
    format_arena,
    format_automaton,
    format_rational,
    parse_arena,
    parse_automaton,
    parse_rational,
)

import oracles
from conftest import random_arena, random_automaton


SMALL = """
lambda 1/2
eve a
adam b
init a
edge a b 1
edge a a -1/3
edge b a 2
"""


class TestRational:
    def test_parse(self):
        assert parse_rational("3/4") == Fraction(3, 4)
        assert parse_rational("-7") == Fraction(-7)
        assert parse_rational("0") == 0

    @pytest.mark.parametrize("bad", ["", "1/0", "x", "1.5", "1/2/3", "/3"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_rational(bad)

    def test_format_round_trip(self):
        for v in (Fraction(3, 4), Fraction(-5), Fraction(0), Fraction(124659, 100000)):
            assert parse_rational(format_rational(v)) == v


class TestArenaFormat:
    def test_parse_small(self):
        arena = parse_arena(SMALL)
        assert arena.names == ("a", "b")
        assert arena.eve == (True, False)
        assert arena.initial == 0
        assert arena.discount == Fraction(1, 2)
        assert arena.weight(0, 1) == 1
        assert arena.weight(0, 0) == Fraction(-1, 3)
        assert arena.max_weight == 2

    def test_canonical_form_is_stable(self):
        arena = parse_arena(SMALL)
        text = format_arena(arena)
        again = parse_arena(text)
        assert format_arena(again) == text
        assert again.names == arena.names
        assert list(again.edges()) == list(arena.edges())

    def test_build_reorders_eve_first(self):
        arena = WeightedArena.build(
            ["e"], ["a"], "a", Fraction(1, 2),
            [("e", "a", 0), ("e", "e", 1), ("a", "e", 2)],
        )
        assert arena.names == ("e", "a")
        assert arena.eve == (True, False)
        assert arena.initial == 1

    @pytest.mark.parametrize(
        "mutation, message",
        [
            ("", "missing lambda"),
            ("lambda 1/2\nlambda 1/3\n", "duplicate lambda"),
            ("lambda 3/2\n", "discount factor"),
            ("lambda 1/2\neve a\nadam b\nedge a b 0\nedge a a 0\nedge b a 0\n", "missing init"),
            ("lambda 1/2\neve a\ninit c\nedge a a 0\n", "unknown"),
            ("lambda 1/2\neve a a\n", "declared twice"),
            ("lambda 1/2\nfrob a\n", "unknown directive"),
            ("lambda 1/2\neve a\nadam b\ninit a\nedge a b x\n", "rational"),
        ],
    )
    def test_parse_errors(self, mutation, message):
        with pytest.raises(FormatError, match=message):
            parse_arena(mutation)

    def test_error_carries_location(self):
        err = None
        try:
            parse_arena("lambda 1/2\nbogus a\n")
        except FormatError as e:
            err = e
        assert err is not None and err.line == 2

    def test_eve_needs_choice(self):
        with pytest.raises(FormatError, match="out-degree"):
            parse_arena("lambda 1/2\neve a\ninit a\nedge a a 0\n")

    def test_every_vertex_needs_successor(self):
        with pytest.raises(FormatError, match="no outgoing"):
            parse_arena("lambda 1/2\neve a\nadam b\ninit a\nedge a b 0\nedge a a 1\n")

    def test_duplicate_edge_rejected(self):
        with pytest.raises(FormatError, match="duplicate edge"):
            parse_arena(SMALL + "edge a b 5\n")

    def test_comments_and_blank_lines_ignored(self):
        arena = parse_arena("# hi\n\n" + SMALL + "\n# bye\n")
        assert arena.n == 2

    def test_random_round_trips(self):
        import random

        rng = random.Random(11)
        for _ in range(25):
            arena = random_arena(rng)
            text = format_arena(arena)
            again = parse_arena(text)
            assert format_arena(again) == text
            assert again.discount == arena.discount
            assert sorted(
                (arena.names[u], arena.names[v], w) for u, v, w in arena.edges()
            ) == sorted((again.names[u], again.names[v], w) for u, v, w in again.edges())


class TestAutomatonFormat:
    def test_parse_fixture(self, investment):
        assert investment.alphabet == ("#", "H", "L")
        assert investment.states[investment.initial] == "q_init"
        assert investment.discount == Fraction(49, 50)
        q_s = investment.index["q_S"]
        s2 = investment.index["q_S2"]
        assert investment.weight(q_s, "L", s2) == 12

    def test_hash_symbol_is_plain_data(self):
        # '#' only starts a comment at the head of a line
        aut = parse_automaton(
            "lambda 1/2\nalphabet #\nstate s initial\ntrans s # s 1\n"
        )
        assert aut.alphabet == ("#",)
        assert aut.weight(0, "#", 0) == 1

    def test_canonical_form_is_stable(self, investment):
        text = format_automaton(investment)
        again = parse_automaton(text)
        assert format_automaton(again) == text

    def test_totality_enforced(self):
        with pytest.raises(FormatError, match="missing transition"):
            parse_automaton(
                "lambda 1/2\nalphabet a b\nstate s initial\ntrans s a s 0\n"
            )

    @pytest.mark.parametrize(
        "text, message",
        [
            ("lambda 1/2\nstate s initial\ntrans s a s 0\n", "missing alphabet"),
            ("lambda 1/2\nalphabet a\nstate s\ntrans s a s 0\n", "initial"),
            ("lambda 1/2\nalphabet a\nstate s initial\nstate s\n", "twice"),
            (
                "lambda 1/2\nalphabet a\nstate s initial\nstate t initial\n",
                "two states",
            ),
            (
                "lambda 1/2\nalphabet a\nstate s initial\ntrans s b s 0\n",
                "unknown symbol",
            ),
            (
                "lambda 1/2\nalphabet a\nstate s initial\ntrans s a s 0\ntrans s a s 1\n",
                "duplicate transition",
            ),
        ],
    )
    def test_parse_errors(self, text, message):
        with pytest.raises(FormatError, match=message):
            parse_automaton(text)

    def test_moves_sorted_by_target(self):
        import random

        rng = random.Random(3)
        for _ in range(10):
            aut = random_automaton(rng)
            for q in range(aut.n):
                for a in aut.alphabet:
                    targets = [t for t, _ in aut.moves(q, a)]
                    assert targets == sorted(targets)


class TestPlays:
    def test_prefix_discounted_matches_direct_sum(self):
        arena = parse_arena(SMALL)
        p = PlayPrefix.from_names(arena, ["a", "b", "a", "a"])
        lam = arena.discount
        direct = arena.weight(0, 1) + lam * arena.weight(1, 0) + lam**2 * arena.weight(0, 0)
        assert p.discounted() == direct
        assert p.discounted(1, 3) == arena.weight(1, 0) + lam * arena.weight(0, 0)
        assert p.discounted(3, 3) == 0

    def test_prefix_rejects_non_edges(self):
        arena = parse_arena(SMALL)
        with pytest.raises(FormatError, match="no edge"):
            PlayPrefix.from_names(arena, ["b", "b"])

    def test_lasso_value_matches_oracle(self):
        arena = parse_arena(SMALL)
        play = LassoPlay.from_names(arena, ["a"], ["b", "a"])
        weights = [
            arena.weight(0, 1),
            arena.weight(1, 0),
            arena.weight(0, 1),
        ]
        assert play.suffix_value(0) == oracles.lasso_value(weights, arena.discount, 1)

    def test_lasso_suffix_rebasing(self):
        arena = parse_arena(SMALL)
        play = LassoPlay.from_names(arena, [], ["a", "b"])
        lam = arena.discount
        v0 = play.suffix_value(0)
        v1 = play.suffix_value(1)
        assert v0 == arena.weight(0, 1) + lam * v1
        assert play.suffix_value(2) == v0

    def test_lasso_needs_closing_edge(self):
        arena = parse_arena(SMALL)
        with pytest.raises(FormatError):
            LassoPlay.from_names(arena, [], ["b"])

    @given(st.integers(0, 30))
    @settings(max_examples=30, deadline=None)
    def test_lasso_agrees_with_truncation(self, i):
        arena = parse_arena(SMALL)
        play = LassoPlay.from_names(arena, ["a", "a"], ["b", "a"])
        lam = arena.discount
        # long truncation bounds the suffix within the discount tail
        horizon = 60
        approx = sum(
            lam**j * arena.weight(play.vertex(i + j), play.vertex(i + j + 1))
            for j in range(horizon)
        )
        tail = lam**horizon * arena.max_weight / (1 - lam)
        assert abs(play.suffix_value(i) - approx) <= tail
