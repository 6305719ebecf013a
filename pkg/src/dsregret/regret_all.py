"""Regret against an unrestricted adversary.

Zero regret reduces to a safety game over the bad edges.  Nonzero
regret is computed exactly by unfolding the arena to a finite horizon:
a positive gap bound guarantees that deviations past the horizon are
too discounted to matter, and the prefix regret collected so far is a
sufficient statistic (one running margin), so states are
(vertex, depth, margin) and memoize.

Two sound shortcuts keep the unfolding small.  A margin so high that
no future deviation candidate can raise it and no future weights can
push it below zero behaves linearly (the state "settles").  A margin
so low that it can never become relevant again is replaced by a dead
marker, collapsing that dimension entirely.  Both thresholds are
contraction fixpoints computed up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from . import _pi
from .arena import LassoPlay, PlayPrefix, WeightedArena
from .rational import format_rational
from .safety import SafetyResult, solve_safety
from .values import ADAM, EVE, PositionalStrategy, ValueTable, value_table

__all__ = [
    "BudgetExceeded",
    "ZeroRegretAll",
    "RegretReport",
    "bad_edges",
    "zero_regret_all",
    "regret_lower_bound",
    "horizon_for_gap",
    "local_regret",
    "prefix_regret",
    "MarginGame",
    "regret_all",
    "regret_threshold_all",
    "decimal_string",
]

DEFAULT_BUDGET = 10**7

_DEAD = "dead"  # margin marker, never observable from outside


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, nodes: int, depth: int | None = None):
        super().__init__(message)
        self.nodes = nodes
        self.depth = depth


def decimal_string(value: Fraction, digits: int = 12) -> str:
    """Advisory decimal rendering; the exact value is always the fraction."""
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def bad_edges(arena: WeightedArena, vt: ValueTable) -> list[tuple[int, int]]:
    """Eve edges whose guarantee is beaten by some alternative's best case."""
    lam = arena.discount
    out = []
    for u in arena.eve_vertices():
        for v, w in arena.succ[u]:
            if w + lam * vt.aval[v] < vt.cval_excluding(u, v):
                out.append((u, v))
    return out


@dataclass
class ZeroRegretAll:
    zero: bool
    witness: PositionalStrategy
    bad: list
    safety: SafetyResult

    def __bool__(self) -> bool:
        return self.zero

    def to_json(self, arena: WeightedArena) -> dict:
        return {
            "zero_regret": self.zero,
            "winner": "eve" if self.zero else "adam",
            "witness": self.witness.to_json(arena),
            "bad_edges": [[arena.names[u], arena.names[v]] for u, v in self.bad],
        }


def zero_regret_all(arena: WeightedArena, vt: ValueTable | None = None) -> ZeroRegretAll:
    """Regret is zero iff Eve wins the safety game over the bad edges.

    Any safety-winning strategy through non-bad edges guarantees, edge
    by edge, at least what every alternative could cooperatively get,
    so it is regret-free; conversely forcing a bad edge forces regret.
    """
    vt = vt or value_table(arena)
    bad = bad_edges(arena, vt)
    succ = [[v for v, _ in arena.succ[u]] for u in range(arena.n)]
    res = solve_safety(arena.eve, succ, set(bad), arena.initial)
    if res.eve_wins:
        witness = PositionalStrategy(EVE, dict(res.eve_choice))
    else:
        witness = PositionalStrategy(ADAM, dict(res.adam_choice))
    return ZeroRegretAll(zero=res.eve_wins, witness=witness, bad=bad, safety=res)


def regret_lower_bound(arena: WeightedArena, vt: ValueTable | None = None) -> Fraction:
    """A positive lower bound on the regret when some bad edge exists."""
    vt = vt or value_table(arena)
    lam = arena.discount
    bad = bad_edges(arena, vt)
    if not bad:
        raise ValueError("no bad edges: the lower bound is only defined when regret > 0")
    gap = min(vt.cval_excluding(u, v) - arena.weight(u, v) - lam * vt.aval[v] for u, v in bad)
    return lam**arena.n * gap


def horizon_for_gap(gap: Fraction, max_weight: Fraction, lam: Fraction) -> int:
    """Least N >= 0 with 2*W*lam^N/(1-lam) < gap, by exact iteration."""
    if gap <= 0:
        raise ValueError("gap must be positive")
    if max_weight == 0:
        return 0
    n = 0
    cur = 2 * Fraction(max_weight) / (1 - lam)
    while cur >= gap:
        cur *= lam
        n += 1
    return n


def local_regret(arena: WeightedArena, vt: ValueTable, play, i: int) -> Fraction:
    """Regret attributable to the decision at position i of a play or prefix.

    Plays must be lasso shaped so the suffix value has a closed form.
    For a prefix ending at position j > i the unresolved tail is
    charged at its worst case; for a prefix ending exactly at i the
    candidate is the full cVal minus aVal spread.
    """
    lam = arena.discount
    if isinstance(play, LassoPlay):
        u = play.vertex(i)
        if not arena.eve[u]:
            raise ValueError(f"position {i} is not an Eve vertex")
        return lam**i * (vt.cval_excluding(u, play.vertex(i + 1)) - play.suffix_value(i))
    prefix: PlayPrefix = play
    j = len(prefix.vertices) - 1
    if not 0 <= i <= j:
        raise IndexError("position out of range")
    u = prefix.vertices[i]
    if not arena.eve[u]:
        raise ValueError(f"position {i} is not an Eve vertex")
    if i == j:
        return lam**i * (vt.cval[u] - vt.aval[u])
    head = vt.cval_excluding(u, prefix.vertices[i + 1]) - prefix.discounted(i, j)
    return lam**i * head - lam**j * vt.aval[prefix.vertices[j]]


def prefix_regret(arena: WeightedArena, vt: ValueTable, prefix: PlayPrefix) -> Fraction:
    """max over Eve positions i < j of the discounted deviation candidates."""
    lam = arena.discount
    j = len(prefix.vertices) - 1
    best = Fraction(0)
    for i in range(j):
        u = prefix.vertices[i]
        if not arena.eve[u]:
            continue
        cand = lam**i * (vt.cval_excluding(u, prefix.vertices[i + 1]) - prefix.discounted(i, j))
        if cand > best:
            best = cand
    return best


class MarginGame:
    """Min-max unfolding over (vertex, remaining depth, margin) states.

    Margins are kept relative to the current depth (divided by lam^d),
    which makes the per-edge update depth independent:

        Eve edge  (u,v):  mu' = (max(mu, raise(u,v)) - w) / lam
        Adam edge (u,v):  mu' = (mu - w) / lam

    with an absent margin acting as -infinity.  The leaf value at
    remaining depth 0 is max(mu, 0) - terminal[v].

    `terminal` must satisfy the two-player Bellman equations of the
    (possibly restricted) arena itself; the settle shortcut depends on
    it.  Raises come from the value table's exclusion query.
    """

    def __init__(self, arena: WeightedArena, vt, adam_allowed=None, terminal=None):
        self.arena = arena
        self.vt = vt
        lam = arena.discount
        self.lam = lam
        succ = []
        for u in range(arena.n):
            out = arena.succ[u]
            if adam_allowed is not None and not arena.eve[u] and u in adam_allowed:
                out = tuple((v, w) for v, w in out if v in adam_allowed[u])
            succ.append(out)
        self.succ = succ
        self.terminal = tuple(terminal) if terminal is not None else tuple(vt.aval)
        self._build_shortcut_tables()

    def _build_shortcut_tables(self):
        arena, lam = self.arena, self.lam
        n = arena.n
        edges = [[(v, w) for v, w in self.succ[u]] for u in range(n)]

        # PG: sup over finite paths of their discounted weight, clipped at 0
        pg_opts = [[(None, Fraction(0))] + edges[u] for u in range(n)]
        pg, _ = _pi.solve_one_player(pg_opts, lam, maximize=True)

        # PD: inf over finite paths, clipped at 0
        pd, _ = _pi.solve_one_player(pg_opts, lam, maximize=False)

        # P: sup of discounted path weight plus a cash-out at cVal when an
        # Eve vertex is reached; -inf (None) where no Eve vertex is reachable
        preds = [[] for _ in range(n)]
        for u in range(n):
            for v, _ in edges[u]:
                preds[v].append(u)
        region = set()
        stack = [u for u in range(n) if arena.eve[u]]
        region.update(stack)
        while stack:
            v = stack.pop()
            for u in preds[v]:
                if u not in region:
                    region.add(u)
                    stack.append(u)
        p: list[Fraction | None] = [None] * n
        if region:
            order = sorted(region)
            pos = {u: i for i, u in enumerate(order)}
            opts = []
            for u in order:
                o = []
                if arena.eve[u]:
                    o.append((None, self.vt.cval[u]))
                o.extend((pos[v], w) for v, w in edges[u] if v in region)
                opts.append(o)
            vals, _ = _pi.solve_one_player(opts, lam, maximize=True)
            for u, x in zip(order, vals):
                p[u] = x

        self.settle = [pg[u] if p[u] is None else max(p[u], pg[u]) for u in range(n)]
        self.drop = pd
        self.no_eve_reachable = [u not in region for u in range(n)]

        # dead_ok: every Eve vertex reachable from u has cVal <= PD there,
        # so raises can never rescue a margin that fell below PD
        ok = [(not arena.eve[u]) or self.vt.cval[u] <= pd[u] for u in range(n)]
        changed = True
        while changed:
            changed = False
            for u in range(n):
                if ok[u] and any(not ok[v] for v, _ in edges[u]):
                    ok[u] = False
                    changed = True
        self.dead_ok = ok

        self._t_layers = [list(map(lambda x: -x, self.terminal))]

    def _dead_value(self, v: int, k: int) -> Fraction:
        """Value of a state whose margin can never matter again."""
        while len(self._t_layers) <= k:
            prev = self._t_layers[-1]
            layer = []
            for u in range(self.arena.n):
                vals = [self.lam * prev[t] for t, _ in self.succ[u]]
                layer.append(min(vals) if self.arena.eve[u] else max(vals))
            self._t_layers.append(layer)
        return self._t_layers[k][v]

    def solve(self, start: int, horizon: int, mu0=None, *, budget: int = DEFAULT_BUDGET,
              eve_move=None, leaf=None):
        """Exact game value from `start`; returns (value, states created).

        eve_move(v, depth) forces Eve's edge (used by strategy
        evaluation); a custom `leaf`(v, mu) replaces the terminal rule
        and disables the settle/dead shortcuts.
        """
        arena, lam = self.arena, self.lam
        shortcuts = leaf is None and eve_move is None
        nodes = 0

        def classify(v, mu, k):
            # returns a final value, or None if the state must expand
            if shortcuts:
                if mu is None:
                    if self.no_eve_reachable[v]:
                        return self._dead_value(v, k)
                elif mu is _DEAD:
                    return self._dead_value(v, k)
                else:
                    if mu >= self.settle[v]:
                        return mu - self.terminal[v]
                    if mu <= self.drop[v] and self.dead_ok[v]:
                        return self._dead_value(v, k)
            if k == 0:
                if leaf is not None:
                    return leaf(v, mu)
                base = Fraction(0) if mu is None or mu is _DEAD else max(mu, Fraction(0))
                return base - self.terminal[v]
            return None

        # forward pass: generate deduplicated layers of live states
        layers: list[dict] = []
        final: list[dict] = []
        cur = {(start, mu0 if mu0 is not None else None)}
        for k in range(horizon, -1, -1):
            live = {}
            done = {}
            for (v, mu) in cur:
                val = classify(v, mu, k)
                if val is None:
                    live[(v, mu)] = None
                else:
                    done[(v, mu)] = val
            nodes += len(live) + len(done)
            if nodes > budget:
                raise BudgetExceeded(
                    f"margin unfolding exceeded {budget} states", nodes, horizon - k
                )
            layers.append(live)
            final.append(done)
            if k == 0:
                assert not live
                break
            depth = horizon - k
            nxt = set()
            for (v, mu) in live:
                forced = eve_move(v, depth) if eve_move is not None and arena.eve[v] else None
                for t, w in self.succ[v]:
                    if forced is not None and t != forced:
                        continue
                    nxt.add((t, self._step(v, t, w, mu, shortcuts)))
            cur = nxt

        # backward pass
        values = final[-1]
        for idx in range(len(layers) - 2, -1, -1):
            depth = idx
            vals = dict(final[idx])
            for (v, mu) in layers[idx]:
                forced = eve_move(v, depth) if eve_move is not None and arena.eve[v] else None
                best = None
                for t, w in self.succ[v]:
                    if forced is not None and t != forced:
                        continue
                    x = lam * values[(t, self._step(v, t, w, mu, shortcuts))]
                    if best is None or (x < best if arena.eve[v] else x > best):
                        best = x
                vals[(v, mu)] = best
            values = vals
        return values[(start, mu0 if mu0 is not None else None)], nodes

    def _step(self, v, t, w, mu, shortcuts=True):
        if mu is _DEAD:
            return _DEAD
        if self.arena.eve[v]:
            raise_val = self.vt.cval_excluding(v, t)
            base = raise_val if mu is None else max(mu, raise_val)
            out = (base - w) / self.lam
        else:
            if mu is None:
                return None
            out = (mu - w) / self.lam
        if shortcuts and self.dead_ok[t] and out <= self.drop[t]:
            return _DEAD
        return out


@dataclass
class RegretReport:
    value: Fraction
    horizon: int
    nodes: int
    witness: object

    def to_json(self, arena: WeightedArena) -> dict:
        witness = self.witness.to_json(arena) if hasattr(self.witness, "to_json") else self.witness
        return {
            "value": format_rational(self.value),
            "decimal": decimal_string(self.value),
            "horizon": self.horizon,
            "witness": witness,
            "nodes": self.nodes,
        }


def regret_all(arena: WeightedArena, budget: int = DEFAULT_BUDGET) -> RegretReport:
    """Exact minimal regret against arbitrary adversary strategies."""
    vt = value_table(arena)
    zr = zero_regret_all(arena, vt)
    if zr.zero:
        return RegretReport(value=Fraction(0), horizon=0, nodes=0, witness=zr.witness)
    gap = regret_lower_bound(arena, vt)
    horizon = horizon_for_gap(gap, arena.max_weight, arena.discount)
    game = MarginGame(arena, vt)
    value, nodes = game.solve(arena.initial, horizon, budget=budget)
    from .strategies import synth_otp

    return RegretReport(
        value=value, horizon=horizon, nodes=nodes, witness=synth_otp(arena, value, vt)
    )


def regret_threshold_all(
    arena: WeightedArena, threshold: Fraction, strict: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    value = regret_all(arena, budget=budget).value
    return value < threshold if strict else value <= threshold
