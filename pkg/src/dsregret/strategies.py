"""Finite-memory strategies: synthesis and exact regret evaluation.

The synthesized strategy probes the cooperative edge while the
discounted stake of switching away still exceeds the target threshold,
then commits to a conservative edge that keeps the worst case optimal.
Probing only happens where the cooperative choice is unique, so the
adversary reveals information by refusing to cooperate.

Evaluation unfolds the arena against the strategy up to the depth
where it becomes positional.  From there a closed form takes over: the
best realized deviation candidate settles against the adversary's
minimal continuation, and future deviations are summarized by a
discounted reachability fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _pi
from .arena import WeightedArena
from .rational import format_rational, parse_rational
from .regret_all import DEFAULT_BUDGET, MarginGame
from .values import (
    EVE,
    PositionalStrategy,
    ValueTable,
    canonical_strategies,
    value_table,
)

__all__ = [
    "OTPStrategy",
    "SwitchStrategy",
    "synth_otp",
    "eval_strategy_regret",
    "strategy_from_json",
    "strategy_to_json",
]


@dataclass(frozen=True)
class OTPStrategy:
    """Optimistic-then-pessimistic: probe while the stake beats the threshold.

    At an Eve vertex after n steps the cooperative edge is taken iff
    the cooperative choice is unique there and lam^n * gap > threshold,
    where gap is the regret the conservative edge would concede at the
    root.  Otherwise the conservative edge is taken, so once the stake
    decays below the threshold the strategy is positional.
    """

    threshold: Fraction
    discount: Fraction
    optimistic: dict
    pessimistic: dict
    gap: dict
    probing: frozenset

    def choice(self, v: int, depth: int) -> int:
        if v not in self.probing:
            return self.pessimistic[v]
        if self.threshold <= 0:
            return self.optimistic[v]
        # decide lam^depth * gap > threshold without a huge exact power:
        # the stake decays below the threshold within a small cutoff
        stake = self.gap[v]
        for _ in range(depth):
            stake *= self.discount
            if stake <= self.threshold:
                return self.pessimistic[v]
        return self.optimistic[v]

    def probe_horizon(self) -> int:
        """Least depth from which the strategy is positional."""
        if not self.probing:
            return 0
        cur = max(self.gap[v] for v in self.probing)
        h = 0
        while cur > self.threshold:
            cur *= self.discount
            h += 1
        return h

    def to_json(self, arena: WeightedArena) -> dict:
        names = arena.names
        return {
            "type": "otp",
            "threshold": format_rational(self.threshold),
            "optimistic": {names[u]: names[t] for u, t in sorted(self.optimistic.items())},
            "pessimistic": {names[u]: names[t] for u, t in sorted(self.pessimistic.items())},
            "probe_gaps": {names[u]: format_rational(self.gap[u]) for u in sorted(self.probing)},
        }


@dataclass(frozen=True)
class SwitchStrategy:
    """Play `pre` for `switch_depth` steps, then `post` forever.

    `post` must guarantee the worst-case value from every vertex the
    play can be at after the switch; evaluation checks that.
    """

    pre: PositionalStrategy
    post: PositionalStrategy
    switch_depth: int

    def choice(self, v: int, depth: int) -> int:
        sigma = self.pre if depth < self.switch_depth else self.post
        return sigma.target(v)

    def to_json(self, arena: WeightedArena) -> dict:
        return {
            "type": "switch",
            "switch_depth": self.switch_depth,
            "pre": self.pre.to_json(arena),
            "post": self.post.to_json(arena),
        }


def synth_otp(arena: WeightedArena, threshold: Fraction, vt: ValueTable | None = None) -> OTPStrategy:
    vt = vt or value_table(arena)
    lam = arena.discount
    canon = canonical_strategies(arena, vt)
    gap = {}
    probing = set()
    for u in arena.eve_vertices():
        t = canon.sigma_cw.target(u)
        gap[u] = vt.cval_excluding(u, t) - arena.weight(u, t) - lam * vt.aval[t]
        if len(canon.copt[u]) == 1 and gap[u] > 0:
            probing.add(u)
    return OTPStrategy(
        threshold=Fraction(threshold),
        discount=lam,
        optimistic=dict(canon.sigma_co.choice),
        pessimistic=dict(canon.sigma_cw.choice),
        gap=gap,
        probing=frozenset(probing),
    )


def _forced_guarantee(arena: WeightedArena, choice: dict) -> list:
    """Adversary's minimal discounted value when Eve is locked to `choice`."""
    opts = []
    for u in range(arena.n):
        if arena.eve[u]:
            t = choice[u]
            opts.append([(t, arena.weight(u, t))])
        else:
            opts.append(list(arena.succ[u]))
    vals, _ = _pi.solve_one_player(opts, arena.discount, maximize=False)
    return vals


def _deviation_table(arena: WeightedArena, vt: ValueTable, choice: dict, wc) -> list:
    """sup over reachable deviation points of their discounted candidate.

    base(u) compares the best alternative at u against following the
    locked edge into the adversary's minimal continuation; the fixpoint
    discounts it back along locked-play paths.  Clamped at zero.
    """
    lam = arena.discount
    zero = Fraction(0)
    base = []
    for u in range(arena.n):
        if arena.eve[u]:
            t = choice[u]
            cand = vt.cval_excluding(u, t) - arena.weight(u, t) - lam * wc[t]
            base.append(max(cand, zero))
        else:
            base.append(zero)
    succ = [
        [choice[u]] if arena.eve[u] else [v for v, _ in arena.succ[u]]
        for u in range(arena.n)
    ]
    r = list(base)
    for _ in range(arena.n + 1):
        nxt = [max(base[u], lam * max(r[t] for t in succ[u])) for u in range(arena.n)]
        if nxt == r:
            break
        r = nxt
    return r


def _post_region(arena: WeightedArena, move, switch_depth: int) -> set:
    """Vertices the play can be at after `switch_depth` steps under `move`."""
    k = switch_depth
    start = (arena.initial, 0)
    seen = {start}
    stack = [start]
    while stack:
        v, c = stack.pop()
        if arena.eve[v]:
            targets = [move(v, c)]
        else:
            targets = [t for t, _ in arena.succ[v]]
        for t in targets:
            s = (t, min(c + 1, k))
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return {v for v, c in seen if c == k}


def _eval_switch_like(arena, vt, move, switch_depth, post_choice, check, budget):
    wc = _forced_guarantee(arena, post_choice)
    if check:
        offending = [
            arena.names[u]
            for u in sorted(_post_region(arena, move, switch_depth))
            if wc[u] < vt.aval[u]
        ]
        if offending:
            raise ValueError(
                "post-switch strategy does not guarantee the worst-case value from: "
                + ", ".join(offending)
            )
    dev = _deviation_table(arena, vt, post_choice, wc)

    def leaf(v, mu):
        if mu is None:
            return dev[v]
        return max(mu - wc[v], dev[v])

    game = MarginGame(arena, vt)
    value, _ = game.solve(
        arena.initial, switch_depth, budget=budget, eve_move=move, leaf=leaf
    )
    return value


def eval_strategy_regret(
    arena: WeightedArena,
    strategy,
    vt: ValueTable | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """Exact regret of a given strategy against an unrestricted adversary."""
    vt = vt or value_table(arena)

    if isinstance(strategy, OTPStrategy):
        if strategy.threshold < 0:
            raise ValueError("negative threshold: the probe condition never expires")
        if strategy.threshold == 0:
            choice = {
                u: strategy.optimistic[u] if u in strategy.probing else strategy.pessimistic[u]
                for u in arena.eve_vertices()
            }
            return _eval_switch_like(arena, vt, None, 0, choice, False, budget)
        return _eval_switch_like(
            arena, vt, strategy.choice, strategy.probe_horizon(),
            strategy.pessimistic, False, budget,
        )

    if isinstance(strategy, SwitchStrategy):
        if strategy.switch_depth < 0:
            raise ValueError("switch depth must be nonnegative")
        return _eval_switch_like(
            arena, vt, strategy.choice, strategy.switch_depth,
            dict(strategy.post.choice), True, budget,
        )

    if isinstance(strategy, PositionalStrategy):
        if strategy.owner != EVE:
            raise ValueError("regret evaluation needs one of Eve's strategies")
        choice = dict(strategy.choice)

        def move(v, depth):
            return choice[v]

        return _eval_switch_like(arena, vt, move, 0, choice, True, budget)

    raise TypeError(f"cannot evaluate strategy of type {type(strategy).__name__}")


def _choice_map(arena: WeightedArena, obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object mapping vertices to successors")
    choice = {}
    for name, target in obj.items():
        if name not in arena.index:
            raise ValueError(f"{where}: unknown vertex {name!r}")
        if target not in arena.index:
            raise ValueError(f"{where}: unknown vertex {target!r}")
        u, t = arena.index[name], arena.index[target]
        if not arena.has_edge(u, t):
            raise ValueError(f"{where}: no edge from {name!r} to {target!r}")
        choice[u] = t
    return choice


def _eve_complete(arena: WeightedArena, choice: dict, where: str) -> dict:
    for u in arena.eve_vertices():
        if u not in choice:
            raise ValueError(f"{where}: vertex {arena.names[u]!r} has no chosen edge")
    return choice


def strategy_from_json(arena: WeightedArena, obj: dict):
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("strategy object needs a 'type' field")
    kind = obj["type"]
    if kind == "positional":
        choice = _eve_complete(arena, _choice_map(arena, obj.get("choice", {}), "choice"), "choice")
        return PositionalStrategy(EVE, choice)
    if kind == "switch":
        k = obj.get("switch_depth")
        if not isinstance(k, int) or k < 0:
            raise ValueError("switch_depth must be a nonnegative integer")
        pre = _eve_complete(arena, _choice_map(arena, obj.get("pre", {}), "pre"), "pre")
        post = _eve_complete(arena, _choice_map(arena, obj.get("post", {}), "post"), "post")
        return SwitchStrategy(PositionalStrategy(EVE, pre), PositionalStrategy(EVE, post), k)
    if kind == "otp":
        if "threshold" not in obj:
            raise ValueError("otp strategy needs a 'threshold' field")
        return synth_otp(arena, parse_rational(str(obj["threshold"])))
    raise ValueError(f"unknown strategy type {kind!r}")


def strategy_to_json(arena: WeightedArena, strategy) -> dict:
    if isinstance(strategy, PositionalStrategy):
        return {
            "type": "positional",
            "owner": strategy.owner,
            "choice": strategy.to_json(arena),
        }
    return strategy.to_json(arena)
