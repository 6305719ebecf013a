"""Regret against adversaries restricted to positional strategies.

What the adversary has already revealed matters: once an Adam vertex
moved somewhere, a positional adversary is committed to that choice
forever.  Knowledge is therefore a set of pins, one per visited Adam
vertex, and deviation candidates must be valued against the final
knowledge, not the knowledge at deviation time.  That forces the
bounded unfolding to carry a ledger of pending deviation entries
instead of a single scalar margin: each entry remembers its index, its
excluded edge and the payoff collected so far, and is only folded into
a number once every reachable Adam vertex is pinned (from then on the
scalar-margin engine finishes the job).

At an uncommitted leaf the tail is the antagonistic value of the
knowledge game restricted to moves that keep at least one
regret-maximizing adversary alive; that game is solved exactly on the
product of the arena with the set of still-viable adversaries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import _pi
from .arena import PlayPrefix, WeightedArena
from .rational import format_rational
from .regret_all import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    MarginGame,
    decimal_string,
    horizon_for_gap,
)
from .safety import solve_safety
from .values import ADAM, PositionalStrategy, coop_table, value_table

__all__ = [
    "KnowledgeState",
    "KnowledgeStrategy",
    "ZeroRegretPositional",
    "PositionalRegretReport",
    "allowed_edges",
    "knowledge_bad_edge",
    "zero_regret_positional",
    "value_denominator",
    "lower_bound_b",
    "horizon_nu",
    "mrp_mrs",
    "regret_positional",
    "oracle_interval_positional",
]

ADVERSARY_BUDGET = 10**6


def _pins_of_prefix(arena: WeightedArena, vertices) -> frozenset:
    """Pin each visited Adam vertex to the move it made; reject conflicts."""
    pins = {}
    for i in range(len(vertices) - 1):
        u, v = vertices[i], vertices[i + 1]
        if arena.eve[u]:
            continue
        if u in pins and pins[u] != v:
            raise ValueError(
                f"prefix is not consistent with any positional adversary: "
                f"{arena.names[u]} moved to both {arena.names[pins[u]]} and {arena.names[v]}"
            )
        pins[u] = v
    return frozenset(pins.items())


def _pins_to_allowed(pins) -> dict:
    return {u: (t,) for u, t in pins}


def _edge_set(arena: WeightedArena, pins) -> frozenset:
    pinned = dict(pins)
    out = set()
    for u in range(arena.n):
        for v, _ in arena.succ[u]:
            if not arena.eve[u] and u in pinned and v != pinned[u]:
                continue
            out.add((u, v))
    return frozenset(out)


def allowed_edges(arena: WeightedArena, prefix: PlayPrefix) -> frozenset:
    """Edges still playable by some positional adversary matching the prefix."""
    return _edge_set(arena, _pins_of_prefix(arena, prefix.vertices))


@dataclass(frozen=True)
class KnowledgeState:
    vertex: int
    pins: frozenset

    def edges(self, arena: WeightedArena) -> list:
        return sorted(_edge_set(arena, self.pins))

    def to_json(self, arena: WeightedArena) -> dict:
        return {
            "vertex": arena.names[self.vertex],
            "allowed": [[arena.names[u], arena.names[v]] for u, v in self.edges(arena)],
        }


class _Ctx:
    """Shared caches: per-knowledge value tables, per-adversary tables,
    committedness, and the margin engines for committed regions."""

    def __init__(self, arena: WeightedArena, budget: int = ADVERSARY_BUDGET):
        self.arena = arena
        self.lam = arena.discount
        self.adam = [u for u in range(arena.n) if not arena.eve[u]]
        self.budget = budget
        self._tables = {}
        self._tau_tables = {}
        self._taus = {}
        self._fmin = {}
        self._engines = {}
        self._committed = {}
        self._tails = {}

    def table(self, pins):
        if pins not in self._tables:
            self._tables[pins] = value_table(self.arena, _pins_to_allowed(pins))
        return self._tables[pins]

    def adversaries(self, pins) -> tuple:
        """All positional adversaries consistent with the pins, as tuples
        aligned with the Adam vertex list."""
        if pins not in self._taus:
            pinned = dict(pins)
            pools = []
            for u in self.adam:
                if u in pinned:
                    pools.append((pinned[u],))
                else:
                    pools.append(tuple(v for v, _ in self.arena.succ[u]))
            count = 1
            for p in pools:
                count *= len(p)
                if count > self.budget:
                    raise BudgetExceeded(
                        f"more than {self.budget} consistent positional adversaries",
                        count,
                    )
            self._taus[pins] = tuple(itertools.product(*pools))
        return self._taus[pins]

    def tau_table(self, tau):
        if tau not in self._tau_tables:
            allowed = {u: (t,) for u, t in zip(self.adam, tau)}
            self._tau_tables[tau] = coop_table(self.arena, allowed)
        return self._tau_tables[tau]

    def fmin(self, pins, u, v) -> Fraction:
        """Least value the raise at (u, v) can settle to under any
        adversary consistent with the pins."""
        key = (pins, u, v)
        if key not in self._fmin:
            self._fmin[key] = min(
                self.tau_table(tau).cval_excluding(u, v) for tau in self.adversaries(pins)
            )
        return self._fmin[key]

    def committed(self, pins, v: int) -> bool:
        """True when every Adam vertex reachable from v is already pinned
        (or has a single edge), so knowledge cannot refine further."""
        key = (pins, v)
        if key not in self._committed:
            pinned = dict(pins)
            seen = {v}
            stack = [v]
            ok = True
            while stack:
                u = stack.pop()
                succ = self.arena.succ[u]
                if not self.arena.eve[u]:
                    if u in pinned:
                        succ = tuple(e for e in succ if e[0] == pinned[u])
                    elif len(succ) > 1:
                        ok = False
                        break
                for t, _ in succ:
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
            self._committed[key] = ok
        return self._committed[key]

    def engine(self, pins) -> MarginGame:
        if pins not in self._engines:
            self._engines[pins] = MarginGame(
                self.arena, self.table(pins), adam_allowed=_pins_to_allowed(pins)
            )
        return self._engines[pins]

    def tail_value(self, pins, mrs: frozenset, v: int) -> Fraction:
        """Antagonistic value at (v, pins) of the knowledge game whose moves
        must keep some adversary of `mrs` viable."""
        start_s = frozenset(t for t in mrs if self._consistent(pins, t))
        key = (start_s, v)
        if key not in self._tails:
            self._tails[key] = self._solve_tail(v, start_s)
        return self._tails[key]

    def _consistent(self, pins, tau) -> bool:
        pinned = dict(pins)
        return all(pinned.get(u, t) == t for u, t in zip(self.adam, tau))

    def _solve_tail(self, v0: int, s0: frozenset) -> Fraction:
        arena = self.arena
        pos = {u: i for i, u in enumerate(self.adam)}
        index = {}
        order = []

        def intern(state):
            if state not in index:
                index[state] = len(order)
                order.append(state)
            return index[state]

        intern((v0, s0))
        options = []
        is_eve = []
        i = 0
        while i < len(order):
            v, s = order[i]
            i += 1
            opts = []
            if arena.eve[v]:
                for t, w in arena.succ[v]:
                    opts.append((intern((t, s)), w))
            else:
                for t, w in arena.succ[v]:
                    st = frozenset(tau for tau in s if tau[pos[v]] == t)
                    if st:
                        opts.append((intern((t, st)), w))
            options.append(opts)
            is_eve.append(arena.eve[v])
        vals = _pi.solve_two_player(is_eve, options, self.lam)
        return vals[0]


def knowledge_bad_edge(arena: WeightedArena, src: KnowledgeState, dst: KnowledgeState,
                       ctx: _Ctx | None = None) -> bool:
    """Is there a consistent positional adversary under which taking this
    edge concedes regret?"""
    ctx = ctx or _Ctx(arena)
    u, v = src.vertex, dst.vertex
    if not arena.eve[u]:
        raise ValueError("bad edges are only defined out of Eve's vertices")
    w = arena.weight(u, v)
    lam = arena.discount
    for tau in ctx.adversaries(src.pins):
        tab = ctx.tau_table(tau)
        if w + lam * tab.cval[v] < tab.cval_excluding(u, v):
            return True
    return False


@dataclass(frozen=True)
class KnowledgeStrategy:
    """Finite-memory strategy whose memory is the knowledge pins."""

    owner: str
    choice: dict

    def target(self, vertex: int, pins: frozenset) -> int:
        return self.choice[(vertex, pins)]

    def to_json(self, arena: WeightedArena) -> dict:
        moves = []
        for (vertex, pins), t in sorted(
            self.choice.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]))
        ):
            ks = KnowledgeState(vertex, pins)
            entry = ks.to_json(arena)
            entry["choice"] = arena.names[t]
            moves.append(entry)
        return {"type": "knowledge", "owner": self.owner, "moves": moves}


@dataclass
class ZeroRegretPositional:
    zero: bool
    witness: KnowledgeStrategy
    states: int

    def __bool__(self) -> bool:
        return self.zero

    def to_json(self, arena: WeightedArena) -> dict:
        return {
            "zero_regret": self.zero,
            "winner": "eve" if self.zero else "adam",
            "witness": self.witness.to_json(arena),
            "states": self.states,
        }


def _knowledge_arena(arena: WeightedArena, ctx: _Ctx, budget: int):
    """Reachable part of the knowledge game plus its bad Eve edges."""
    index = {}
    order = []

    def intern(state):
        if state not in index:
            index[state] = len(order)
            order.append(state)
        return index[state]

    intern((arena.initial, frozenset()))
    succ = []
    bad = set()
    i = 0
    while i < len(order):
        v, pins = order[i]
        if len(order) > budget:
            raise BudgetExceeded(f"knowledge game exceeded {budget} states", len(order))
        out = []
        if arena.eve[v]:
            src = KnowledgeState(v, pins)
            for t, _ in arena.succ[v]:
                j = intern((t, pins))
                out.append(j)
                if knowledge_bad_edge(arena, src, KnowledgeState(t, pins), ctx):
                    bad.add((i, j))
        else:
            pinned = dict(pins)
            for t, _ in arena.succ[v]:
                if v in pinned and t != pinned[v]:
                    continue
                out.append(intern((t, frozenset(pins | {(v, t)}))))
        succ.append(out)
        i += 1
    is_eve = [arena.eve[v] for v, _ in order]
    return order, succ, is_eve, bad


def zero_regret_positional(arena: WeightedArena, budget: int = ADVERSARY_BUDGET):
    ctx = _Ctx(arena, budget)
    order, succ, is_eve, bad = _knowledge_arena(arena, ctx, budget)
    res = solve_safety(is_eve, succ, bad, 0)
    if res.eve_wins:
        choice = {order[i]: order[j][0] for i, j in res.eve_choice.items()}
        witness = KnowledgeStrategy("eve", choice)
    else:
        choice = {order[i]: order[j][0] for i, j in res.adam_choice.items()}
        witness = KnowledgeStrategy("adam", choice)
    return ZeroRegretPositional(zero=res.eve_wins, witness=witness, states=len(order))


def value_denominator(arena: WeightedArena) -> int:
    """Common denominator bound for every value of every sub-arena."""
    alpha, beta = arena.discount.numerator, arena.discount.denominator
    n = arena.n
    return beta**n * (beta**n - alpha**n)


def lower_bound_b(arena: WeightedArena, budget: int = ADVERSARY_BUDGET) -> Fraction:
    """Positive lower bound on the regret against positional adversaries.

    Minimum conceded gap over reachable knowledge edges that are bad,
    restricted to the adversaries actually witnessing the badness,
    discounted by the worst time to reach and reveal them.
    """
    ctx = _Ctx(arena, budget)
    order, succ, is_eve, bad = _knowledge_arena(arena, ctx, budget)
    lam = arena.discount
    best = None
    for i, j in bad:
        (u, pins), (v, _) = order[i], order[j]
        w = arena.weight(u, v)
        for tau in ctx.adversaries(pins):
            tab = ctx.tau_table(tau)
            gap = tab.cval_excluding(u, v) - w - lam * tab.cval[v]
            if gap > 0 and (best is None or gap < best):
                best = gap
    if best is None:
        raise ValueError("zero regret against positional adversaries: no lower bound")
    return lam ** (arena.n * (arena.edge_count() + 1)) * best


def horizon_nu(arena: WeightedArena, b: Fraction) -> int:
    """Unfolding depth past which no deviation can close a gap of b."""
    if b <= 0:
        raise ValueError("bound must be positive")
    w = arena.max_weight
    lam = arena.discount
    n_b = horizon_for_gap(b, w, lam)
    if w == 0:
        return n_b
    alpha, beta = lam.numerator, lam.denominator
    target = Fraction(1, beta ** (n_b + arena.n) * (beta**arena.n - alpha**arena.n))
    k = 0
    cur = Fraction(w) / (1 - lam)
    while cur >= target:
        cur *= lam
        k += 1
    return n_b + k


def _tail_horizon(arena: WeightedArena, b: Fraction) -> int:
    """Depth where the remaining tail drops below the value grid spacing."""
    w = arena.max_weight
    lam = arena.discount
    if w == 0:
        return 0
    n_b = horizon_for_gap(b, w, lam)
    target = Fraction(1, arena.discount.denominator ** (n_b + arena.n) * value_denominator(arena))
    nu = 0
    cur = Fraction(w) / (1 - lam)
    while cur >= target:
        cur *= lam
        nu += 1
    return nu


def mrp_mrs(arena: WeightedArena, prefix: PlayPrefix):
    """Indices attaining the prefix regret, and the consistent positional
    adversaries under which some attaining candidate keeps its value."""
    ctx = _Ctx(arena)
    pins = _pins_of_prefix(arena, prefix.vertices)
    tab = coop_table(arena, _pins_to_allowed(pins))
    lam = arena.discount
    end = len(prefix.vertices) - 1
    cands = {}
    for i in range(end):
        u = prefix.vertices[i]
        if not arena.eve[u]:
            continue
        cands[i] = lam**i * (
            tab.cval_excluding(u, prefix.vertices[i + 1]) - prefix.discounted(i, end)
        )
    regret = max(cands.values(), default=Fraction(0))
    regret = max(regret, Fraction(0))
    mrp = frozenset(i for i, c in cands.items() if c == regret)
    taus = ctx.adversaries(pins)
    if not mrp:
        chosen = taus
    else:
        chosen = []
        for tau in taus:
            t_tab = ctx.tau_table(tau)
            for i in mrp:
                u, v = prefix.vertices[i], prefix.vertices[i + 1]
                if t_tab.cval_excluding(u, v) == tab.cval_excluding(u, v):
                    chosen.append(tau)
                    break
    strategies = tuple(
        PositionalStrategy(ADAM, dict(zip(ctx.adam, tau))) for tau in chosen
    )
    return mrp, strategies


@dataclass
class PositionalRegretReport:
    value: Fraction
    horizon: int
    nodes: int
    witness: object | None
    notes: tuple = ()

    def to_json(self, arena: WeightedArena) -> dict:
        out = {
            "value": format_rational(self.value),
            "decimal": decimal_string(self.value),
            "horizon": self.horizon,
            "witness": self.witness.to_json(arena) if self.witness is not None else None,
            "nodes": self.nodes,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _entry_dominates(a, b, fbox) -> bool:
    """Entry a makes entry b irrelevant for every completion.

    Same-key weak dominance is safe (the survivor keeps the key alive
    for adversary selection); cross-key dominance must be strict at the
    pessimal corners or a tying key could vanish.
    """
    _, au, at, ad, a_pow = a
    _, bu, bt, bd, b_pow = b
    afmin, afmax = fbox(au, at)
    bfmin, bfmax = fbox(bu, bt)
    if (au, at) == (bu, bt):
        return a_pow * afmin + ad >= b_pow * afmin + bd and \
               a_pow * afmax + ad >= b_pow * afmax + bd
    return a_pow * afmin + ad > b_pow * bfmax + bd


def _prune_ledger(entries, fbox):
    kept = []
    for e in entries:
        if any(_entry_dominates(o, e, fbox) for o in kept):
            continue
        kept = [o for o in kept if not _entry_dominates(e, o, fbox)]
        kept.append(e)
    return tuple(kept)


def regret_positional(arena: WeightedArena, budget: int = DEFAULT_BUDGET) -> PositionalRegretReport:
    """Exact minimal regret when the adversary must play positionally."""
    ctx = _Ctx(arena)
    zero = zero_regret_positional(arena)
    if zero.zero:
        return PositionalRegretReport(
            value=Fraction(0), horizon=0, nodes=zero.states, witness=zero.witness
        )
    b = lower_bound_b(arena)
    nu = max(horizon_nu(arena, b), _tail_horizon(arena, b))
    try:
        value, nodes, notes = _solve_positional(arena, ctx, nu, budget)
    except BudgetExceeded as exc:
        exc.partial = {"interval": oracle_interval_positional(arena, 6)}
        raise
    return PositionalRegretReport(
        value=value, horizon=nu, nodes=nodes, witness=None, notes=notes
    )


def _solve_positional(arena: WeightedArena, ctx: _Ctx, nu: int, budget: int):
    lam = arena.discount
    zero = Fraction(0)
    notes = set()
    nodes = 0
    lam_pows = [Fraction(1)]
    for _ in range(nu + 1):
        lam_pows.append(lam_pows[-1] * lam)

    def leaf_value(v, pins, entries, dsum):
        tab = ctx.table(pins)
        cands = {}
        for (i, u, t, d, lam_i) in entries:
            cands[(i, u, t)] = lam_i * tab.cval_excluding(u, t) + d - dsum
        regret = max(max(cands.values(), default=zero), zero)
        attaining = {(u, t) for (i, u, t), c in cands.items() if c == regret}
        taus = ctx.adversaries(pins)
        if not attaining:
            mrs = frozenset(taus)
        else:
            mrs = frozenset(
                tau for tau in taus
                if any(
                    ctx.tau_table(tau).cval_excluding(u, t) == tab.cval_excluding(u, t)
                    for (u, t) in attaining
                )
            )
        if not mrs:
            notes.add("empty adversary selection at a leaf; unrestricted tail used")
            tail = ctx.table(pins).aval[v]
        else:
            tail = ctx.tail_value(pins, mrs, v)
        return regret - lam_pows[nu] * tail

    def committed_value(v, pins, entries, dsum, depth):
        tab = ctx.table(pins)
        mu = None
        if entries:
            m_abs = max(lam_i * tab.cval_excluding(u, t) + d - dsum
                        for (i, u, t, d, lam_i) in entries)
            mu = m_abs / lam_pows[depth]
        val, n = ctx.engine(pins).solve(v, nu - depth, mu, budget=budget - nodes)
        return lam_pows[depth] * val, n

    # forward layered generation over (vertex, pins, ledger, dsum)
    start = (arena.initial, frozenset(), (), zero)
    layers = []
    finals = []
    cur = {start}
    for depth in range(nu + 1):
        live = {}
        done = {}
        for state in cur:
            v, pins, entries, dsum = state
            if ctx.committed(pins, v):
                val, n = committed_value(v, pins, entries, dsum, depth)
                nodes += n
                done[state] = val
            elif depth == nu:
                done[state] = leaf_value(v, pins, entries, dsum)
            else:
                live[state] = None
        nodes += len(cur)
        if nodes > budget:
            raise BudgetExceeded(f"unfolding exceeded {budget} states", nodes, depth)
        layers.append(live)
        finals.append(done)
        if depth == nu:
            break
        nxt = set()
        for state in live:
            for child in _children(arena, ctx, state, depth, lam_pows):
                nxt.add(child)
        cur = nxt

    values = finals[-1]
    for depth in range(len(layers) - 2, -1, -1):
        vals = dict(finals[depth])
        for state in layers[depth]:
            v = state[0]
            best = None
            for child in _children(arena, ctx, state, depth, lam_pows):
                x = values[child]
                if best is None or (x < best if arena.eve[v] else x > best):
                    best = x
            vals[state] = best
        values = vals
    return values[start], nodes, tuple(sorted(notes))


def _children(arena: WeightedArena, ctx: _Ctx, state, depth: int, lam_pows):
    v, pins, entries, dsum = state
    lam_d = lam_pows[depth]
    tab = ctx.table(pins)

    def fbox(u, t):
        return ctx.fmin(pins, u, t), tab.cval_excluding(u, t)

    out = []
    if arena.eve[v]:
        for t, w in arena.succ[v]:
            entry = (depth, v, t, dsum, lam_d)
            ledger = _prune_ledger(entries + (entry,), fbox)
            out.append((t, pins, ledger, dsum + lam_d * w))
    else:
        pinned = dict(pins)
        for t, w in arena.succ[v]:
            if v in pinned and t != pinned[v]:
                continue
            npins = pins if v in pinned else frozenset(pins | {(v, t)})
            out.append((t, npins, entries, dsum + lam_d * w))
    return out


def oracle_interval_positional(arena: WeightedArena, depth: int,
                               budget: int = DEFAULT_BUDGET):
    """Certified enclosure of the positional-adversary regret.

    Unfolds the knowledge game to each depth up to `depth`, brackets
    every leaf by best/worst completions of its pending candidates plus
    discounted tail slack, and intersects the per-depth intervals so
    deepening can only shrink the result.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    ctx = _Ctx(arena)
    lo, hi = None, None
    nodes = [0]
    for d in range(1, depth + 1):
        raw = _oracle_raw(arena, ctx, d, budget, nodes)
        if lo is None:
            lo, hi = raw
        else:
            lo, hi = max(lo, raw[0]), min(hi, raw[1])
    return lo, hi


def _oracle_raw(arena: WeightedArena, ctx: _Ctx, depth: int, budget: int, nodes):
    lam = arena.discount
    zero = Fraction(0)
    slack_unit = Fraction(arena.max_weight) / (1 - lam) if arena.max_weight else zero

    def rec(v, pins, entries, dsum, d):
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"oracle exceeded {budget} nodes", nodes[0])
        if d == depth:
            tab = ctx.table(pins)
            slack = lam**d * slack_unit
            best_hi = max(
                (lam_i * tab.cval_excluding(u, t) + dd - dsum + slack
                 for (i, u, t, dd, lam_i) in entries),
                default=zero,
            )
            best_lo = max(
                (lam_i * ctx.fmin(pins, u, t) + dd - dsum - slack
                 for (i, u, t, dd, lam_i) in entries),
                default=zero,
            )
            hi = max(best_hi, 2 * slack, zero)
            lo = max(best_lo, zero)
            return lo, hi
        lam_d = lam**d
        if arena.eve[v]:
            lo = hi = None
            for t, w in arena.succ[v]:
                entry = (d, v, t, dsum, lam_d)
                slo, shi = rec(t, pins, entries + (entry,), dsum + lam_d * w, d + 1)
                lo = slo if lo is None else min(lo, slo)
                hi = shi if hi is None else min(hi, shi)
            return lo, hi
        pinned = dict(pins)
        lo = hi = None
        for t, w in arena.succ[v]:
            if v in pinned and t != pinned[v]:
                continue
            npins = pins if v in pinned else frozenset(pins | {(v, t)})
            slo, shi = rec(t, npins, entries, dsum + lam_d * w, d + 1)
            lo = slo if lo is None else max(lo, slo)
            hi = shi if hi is None else max(hi, shi)
        return lo, hi

    return rec(arena.initial, frozenset(), (), zero, 0)
