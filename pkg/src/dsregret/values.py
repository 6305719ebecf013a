"""Antagonistic and co-operative values, and the canonical strategies.

All computations are exact.  cVal treats every vertex as a maximizer;
aVal is the discounted game value with Eve maximizing and Adam
minimizing, solved by strategy improvement with exact evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _pi
from .arena import LassoPlay, WeightedArena
from .rational import format_rational

__all__ = [
    "EVE",
    "ADAM",
    "PositionalStrategy",
    "CoopTable",
    "ValueTable",
    "CanonicalStrategies",
    "discounted_sum",
    "loop_value",
    "coop_value",
    "antag_value",
    "coop_value_excluding",
    "value_table",
    "coop_table",
    "canonical_strategies",
    "follow_profile",
]

EVE = "eve"
ADAM = "adam"


def discounted_sum(weights, lam: Fraction) -> Fraction:
    """Sum of lam^i * w_i over a finite weight sequence."""
    total = Fraction(0)
    factor = Fraction(1)
    for w in weights:
        total += factor * w
        factor *= lam
    return total


def loop_value(weight: Fraction, lam: Fraction) -> Fraction:
    """Value of repeating a single weight forever."""
    return Fraction(weight) / (1 - lam)


@dataclass(frozen=True)
class PositionalStrategy:
    """One chosen outgoing edge per owned vertex."""

    owner: str
    choice: dict

    def target(self, v: int) -> int:
        return self.choice[v]

    def to_json(self, arena: WeightedArena) -> dict:
        return {arena.names[u]: arena.names[t] for u, t in sorted(self.choice.items())}


def _options(arena: WeightedArena, adam_allowed=None):
    """Per-vertex option lists; Adam successor sets may be restricted."""
    opts = []
    for u in range(arena.n):
        out = arena.succ[u]
        if adam_allowed is not None and not arena.eve[u] and u in adam_allowed:
            allowed = adam_allowed[u]
            out = tuple((v, w) for v, w in out if v in allowed)
            if not out:
                raise ValueError(f"restriction empties vertex {arena.names[u]}")
        opts.append([(v, w) for v, w in out])
    return opts


class CoopTable:
    """cVal for every vertex, with fast exclusion queries.

    The top two distinct-target option values per vertex make
    cVal excluding one edge a constant-time lookup.
    """

    def __init__(self, arena: WeightedArena, options, cval):
        self.arena = arena
        self.cval = tuple(cval)
        lam = arena.discount
        best = []
        for u in range(arena.n):
            b1 = None
            t1 = None
            for v, w in options[u]:
                x = w + lam * self.cval[v]
                if b1 is None or x > b1:
                    b1, t1 = x, v
            b2 = None
            for v, w in options[u]:
                if v == t1:
                    continue
                x = w + lam * self.cval[v]
                if b2 is None or x > b2:
                    b2 = x
            best.append((b1, t1, b2))
        self._best = best

    def cval_excluding(self, u: int, v: int) -> Fraction:
        """max over edges (u, v') with v' != v of w + lam*cVal^{v'}."""
        b1, t1, b2 = self._best[u]
        if v != t1:
            return b1
        if b2 is None:
            raise ValueError(
                f"vertex {self.arena.names[u]} has no edge avoiding {self.arena.names[v]}"
            )
        return b2


class ValueTable(CoopTable):
    """aVal and cVal together; satisfies both Bellman systems exactly."""

    def __init__(self, arena: WeightedArena, options, cval, aval):
        super().__init__(arena, options, cval)
        self.aval = tuple(aval)

    def to_json(self) -> dict:
        names = self.arena.names
        return {
            names[v]: {
                "aval": format_rational(self.aval[v]),
                "cval": format_rational(self.cval[v]),
            }
            for v in range(self.arena.n)
        }


def coop_value(arena: WeightedArena, adam_allowed=None) -> tuple:
    opts = _options(arena, adam_allowed)
    vals, _ = _pi.solve_one_player(opts, arena.discount, maximize=True)
    return tuple(vals)


def antag_value(arena: WeightedArena, adam_allowed=None) -> tuple:
    opts = _options(arena, adam_allowed)
    vals = _pi.solve_two_player(arena.eve, opts, arena.discount)
    return tuple(vals)


def coop_table(arena: WeightedArena, adam_allowed=None) -> CoopTable:
    opts = _options(arena, adam_allowed)
    vals, _ = _pi.solve_one_player(opts, arena.discount, maximize=True)
    return CoopTable(arena, opts, vals)


def value_table(arena: WeightedArena, adam_allowed=None) -> ValueTable:
    opts = _options(arena, adam_allowed)
    cvals, _ = _pi.solve_one_player(opts, arena.discount, maximize=True)
    avals = _pi.solve_two_player(arena.eve, opts, arena.discount)
    return ValueTable(arena, opts, cvals, avals)


def coop_value_excluding(arena: WeightedArena, values: CoopTable, u: int, v: int) -> Fraction:
    return values.cval_excluding(u, v)


@dataclass(frozen=True)
class CanonicalStrategies:
    sigma_wc: PositionalStrategy
    tau_wc: PositionalStrategy
    sigma_co: PositionalStrategy
    sigma_cw: PositionalStrategy
    copt: dict
    wcopt: dict


def canonical_strategies(arena: WeightedArena, vt: ValueTable) -> CanonicalStrategies:
    """The four canonical positional strategies, ties broken by vertex order."""
    lam = arena.discount
    sigma_wc = {}
    sigma_co = {}
    sigma_cw = {}
    tau_wc = {}
    copt: dict = {}
    wcopt: dict = {}
    for u in range(arena.n):
        if arena.eve[u]:
            co = tuple(v for v, w in arena.succ[u] if w + lam * vt.cval[v] == vt.cval[u])
            wc = tuple(v for v, w in arena.succ[u] if w + lam * vt.aval[v] == vt.aval[u])
            copt[u] = co
            wcopt[u] = wc
            sigma_co[u] = co[0]
            sigma_wc[u] = wc[0]
            best = None
            pick = wc[0]
            for v, w in arena.succ[u]:
                if v not in wc:
                    continue
                x = w + lam * vt.cval[v]
                if best is None or x > best:
                    best, pick = x, v
            sigma_cw[u] = pick
        else:
            for v, w in arena.succ[u]:
                if w + lam * vt.aval[v] == vt.aval[u]:
                    tau_wc[u] = v
                    break
    return CanonicalStrategies(
        sigma_wc=PositionalStrategy(EVE, sigma_wc),
        tau_wc=PositionalStrategy(ADAM, tau_wc),
        sigma_co=PositionalStrategy(EVE, sigma_co),
        sigma_cw=PositionalStrategy(EVE, sigma_cw),
        copt=copt,
        wcopt=wcopt,
    )


def follow_profile(arena: WeightedArena, choice: dict, start: int | None = None) -> LassoPlay:
    """Unroll a full positional profile (every vertex mapped) into a lasso."""
    v = arena.initial if start is None else start
    seen: dict[int, int] = {}
    seq: list[int] = []
    while v not in seen:
        seen[v] = len(seq)
        seq.append(v)
        v = choice[v]
    k = seen[v]
    return LassoPlay(arena, tuple(seq[:k]), tuple(seq[k:]))
