"""Regret against word adversaries on weighted automata.

Here Adam spells an infinite word and Eve answers by resolving the
automaton's nondeterminism one symbol at a time.  Her regret compares
the run she builds against the best run on the same word.  The module
covers four queries: the exact regret of a fixed positional resolution
(a one-player product game), the zero-regret decision by enumeration of
positional resolutions, an epsilon-gap threshold decision played on a
bounded-horizon subset game, and an interval oracle used for
cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _pi
from .arena import FormatError, WeightedAutomaton
from .regret_all import BudgetExceeded

ENUM_BUDGET = 10**6
SUBSET_BUDGET = 10**6


@dataclass(frozen=True)
class ResolutionStrategy:
    """A positional resolution: one chosen transition per (state, symbol)."""

    choice: dict

    def target(self, q: int, a: str) -> int:
        return self.choice[(q, a)]

    def to_json(self, automaton: WeightedAutomaton) -> dict:
        names = automaton.states
        table: dict[str, dict[str, str]] = {}
        for (q, a), t in sorted(self.choice.items()):
            table.setdefault(names[q], {})[a] = names[t]
        return {"type": "resolution", "choice": table}


def resolution_from_json(automaton: WeightedAutomaton, obj: dict) -> ResolutionStrategy:
    if obj.get("type") != "resolution":
        raise FormatError("expected a resolution strategy object")
    table = obj.get("choice")
    if not isinstance(table, dict):
        raise FormatError("resolution strategy needs a choice table")
    choice: dict[tuple[int, str], int] = {}
    for qname, row in table.items():
        if qname not in automaton.index:
            raise FormatError(f"unknown state {qname!r} in strategy")
        q = automaton.index[qname]
        for a, tname in row.items():
            if tname not in automaton.index:
                raise FormatError(f"unknown state {tname!r} in strategy")
            choice[(q, a)] = automaton.index[tname]
    _check_resolution(automaton, choice)
    return ResolutionStrategy(choice)


def _check_resolution(automaton: WeightedAutomaton, choice: dict) -> None:
    for q in range(automaton.n):
        for a in automaton.alphabet:
            key = (q, a)
            if key not in choice:
                raise ValueError(
                    f"resolution is missing a choice at ({automaton.states[q]}, {a})"
                )
            targets = [t for t, _ in automaton.moves(q, a)]
            if choice[key] not in targets:
                raise ValueError(
                    f"resolution picks a missing transition at ({automaton.states[q]}, {a})"
                )


def _product_value(automaton: WeightedAutomaton, choice: dict) -> Fraction:
    """cVal of the one-player product from (q_I, q_I).

    The free component follows any run while the second is forced along
    the resolution; edge weights are the weight differences, so the
    value is the largest advantage any run on any word can accumulate
    over the resolved run.
    """
    lam = automaton.discount
    root = (automaton.initial, automaton.initial)
    index = {root: 0}
    order = [root]
    options: list[list[tuple[int | None, Fraction]]] = []
    i = 0
    while i < len(order):
        p, q = order[i]
        opts: list[tuple[int | None, Fraction]] = []
        for a in automaton.alphabet:
            t = choice[(q, a)]
            wq = automaton.weight(q, a, t)
            for s, w in automaton.moves(p, a):
                pair = (s, t)
                j = index.get(pair)
                if j is None:
                    j = index[pair] = len(order)
                    order.append(pair)
                opts.append((j, w - wq))
        options.append(opts)
        i += 1
    vals, _ = _pi.solve_one_player(options, lam, maximize=True)
    return vals[0]


def strategy_regret_word(automaton: WeightedAutomaton, sigma: ResolutionStrategy) -> Fraction:
    """Exact regret of a fixed positional resolution."""
    _check_resolution(automaton, sigma.choice)
    return max(Fraction(0), _product_value(automaton, sigma.choice))


class _ResolutionEvaluator:
    """Shared machinery for checking many resolutions of one automaton.

    States whose entire forward closure is deterministic form a frozen
    region; the pair game restricted to that region is solved once and
    reused for every resolution.  When the remaining states are acyclic
    under the automaton's own transitions, a resolution is scored by a
    short recursion over pairs, with per-(symbol, choice) values cached
    across resolutions keyed by the handful of downstream choices they
    can actually see.  The same recursion scores partial resolutions:
    unassigned choices are resolved adaptively in Eve's favor, so the
    result is a lower bound on every completion and safe to prune on.
    Cyclic nondeterminism falls back to a full product solve per
    resolution.
    """

    _CTX_CAP = 8

    def __init__(self, automaton: WeightedAutomaton):
        self.aut = automaton
        self.lam = automaton.discount
        n = automaton.n
        succ = [set() for _ in range(n)]
        nondet = set()
        for q in range(n):
            for a in automaton.alphabet:
                mv = automaton.moves(q, a)
                if len(mv) > 1:
                    nondet.add(q)
                for t, _ in mv:
                    succ[q].add(t)
        reach: list[set[int]] = []
        for q in range(n):
            seen = {q}
            stack = [q]
            while stack:
                u = stack.pop()
                for v in succ[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            reach.append(seen)
        self.frozen = frozenset(q for q in range(n) if not (reach[q] & nondet))
        live = [q for q in range(n) if q not in self.frozen]
        self.acyclic = self._topo_ok(live, succ)
        self._frozen_vals: dict[tuple[int, int], Fraction] | None = None
        if self.acyclic:
            self._solve_frozen()
            self.ctx: list[tuple[tuple[int, str], ...]] = []
            for q in range(n):
                if q in self.frozen:
                    self.ctx.append(())
                    continue
                keys = [
                    (u, a)
                    for u in sorted(reach[q] - self.frozen)
                    for a in automaton.alphabet
                    if len(automaton.moves(u, a)) > 1
                ]
                self.ctx.append(tuple(keys))
            self._branch_cache: dict = {}

    @staticmethod
    def _topo_ok(live, succ) -> bool:
        marks: dict[int, int] = {}
        live_set = set(live)

        def visit(u: int) -> bool:
            marks[u] = 1
            for v in succ[u]:
                if v not in live_set:
                    continue
                state = marks.get(v)
                if state == 1:
                    return False
                if state is None and not visit(v):
                    return False
            marks[u] = 2
            return True

        return all(visit(u) for u in live if u not in marks)

    def _solve_frozen(self) -> None:
        aut = self.aut
        pairs = [(p, q) for p in range(aut.n) for q in sorted(self.frozen)]
        index = {pair: i for i, pair in enumerate(pairs)}
        options: list[list[tuple[int | None, Fraction]]] = []
        for p, q in pairs:
            opts = []
            for a in aut.alphabet:
                t = aut.moves(q, a)[0][0]
                wq = aut.weight(q, a, t)
                for s, w in aut.moves(p, a):
                    opts.append((index[(s, t)], w - wq))
            options.append(opts)
        if pairs:
            vals, _ = _pi.solve_one_player(options, self.lam, maximize=True)
        else:
            vals = []
        self._frozen_vals = {pair: vals[i] for i, pair in enumerate(pairs)}

    def value(self, sigma: dict) -> Fraction:
        if not self.acyclic:
            return _product_value(self.aut, sigma)
        local: dict[tuple[int, int], Fraction] = {}
        root = (self.aut.initial, self.aut.initial)
        return self._pair_value(root[0], root[1], sigma, local)

    def _pair_value(self, p: int, q: int, sigma: dict, local: dict) -> Fraction:
        if q in self.frozen:
            return self._frozen_vals[(p, q)]
        key = (p, q)
        got = local.get(key)
        if got is not None:
            return got
        aut = self.aut
        best: Fraction | None = None
        for a in aut.alphabet:
            mv = aut.moves(q, a)
            if len(mv) == 1:
                t = mv[0][0]
            else:
                t = sigma.get((q, a))
            if t is None:
                val = max(
                    min(
                        w - wq + self.lam * self._pair_value(s, t2, sigma, local)
                        for t2, wq in mv
                    )
                    for s, w in aut.moves(p, a)
                )
            else:
                val = self._branch_value(p, q, a, t, sigma, local)
            if best is None or val > best:
                best = val
        local[key] = best
        return best

    def _branch_value(self, p, q, a, t, sigma, local) -> Fraction:
        ctx_keys = self.ctx[t]
        cache_key = None
        if len(ctx_keys) <= self._CTX_CAP:
            picked = tuple(sigma.get(k) for k in ctx_keys)
            if None not in picked:
                cache_key = (p, q, a, t, picked)
                got = self._branch_cache.get(cache_key)
                if got is not None:
                    return got
        aut = self.aut
        wq = aut.weight(q, a, t)
        val = max(
            w - wq + self.lam * self._pair_value(s, t, sigma, local)
            for s, w in aut.moves(p, a)
        )
        if cache_key is not None:
            self._branch_cache[cache_key] = val
        return val


def zero_regret_word(
    automaton: WeightedAutomaton, budget: int = ENUM_BUDGET
) -> tuple[bool, ResolutionStrategy | None]:
    """Decide whether some positional resolution has regret 0.

    Resolutions are enumerated in canonical (state, symbol, target)
    order and the first regret-free one is returned as witness.  The
    enumeration refuses to start when the number of resolutions exceeds
    the budget.
    """
    aut = automaton
    keys: list[tuple[int, str]] = []
    fanout: list[tuple[int, ...]] = []
    fixed: dict[tuple[int, str], int] = {}
    total = 1
    for q in range(aut.n):
        for a in aut.alphabet:
            targets = tuple(t for t, _ in aut.moves(q, a))
            if len(targets) == 1:
                fixed[(q, a)] = targets[0]
            else:
                keys.append((q, a))
                fanout.append(targets)
                total *= len(targets)
                if total > budget:
                    raise BudgetExceeded(
                        f"{total}+ positional resolutions exceed the budget of {budget}",
                        nodes=total,
                    )
    evaluator = _ResolutionEvaluator(aut)
    sigma = dict(fixed)
    if evaluator.acyclic:
        # Depth-first search in canonical key order.  A node is cut when
        # even the Eve-favoring relaxation of its free choices has value
        # above zero, so the first full assignment reached is the same
        # witness plain enumeration would find.
        def search(idx: int) -> ResolutionStrategy | None:
            if evaluator.value(sigma) > 0:
                return None
            if idx == len(keys):
                return ResolutionStrategy(dict(sigma))
            for t in fanout[idx]:
                sigma[keys[idx]] = t
                found = search(idx + 1)
                if found is not None:
                    return found
            del sigma[keys[idx]]
            return None

        witness = search(0)
        return (witness is not None), witness
    counters = [0] * len(keys)
    for key, targets in zip(keys, fanout):
        sigma[key] = targets[0]
    while True:
        if evaluator.value(sigma) <= 0:
            return True, ResolutionStrategy(dict(sigma))
        pos = len(keys) - 1
        while pos >= 0:
            counters[pos] += 1
            if counters[pos] < len(fanout[pos]):
                sigma[keys[pos]] = fanout[pos][counters[pos]]
                break
            counters[pos] = 0
            sigma[keys[pos]] = fanout[pos][0]
            pos -= 1
        if pos < 0:
            return False, None


@dataclass(frozen=True)
class EpsilonGapReport:
    """Outcome of the gap decision; truthy exactly on YES."""

    answer: bool
    horizon: int
    states: int

    def __bool__(self) -> bool:
        return self.answer

    def to_json(self) -> dict:
        return {
            "answer": "YES" if self.answer else "NO",
            "horizon": self.horizon,
            "states": self.states,
        }


def gap_horizon(automaton: WeightedAutomaton, epsilon: Fraction) -> int:
    """Least N with lambda^N * W / (1 - lambda) < epsilon / 4."""
    w = automaton.max_weight
    if w == 0:
        return 0
    lam = automaton.discount
    tail = w / (1 - lam)
    cut = Fraction(epsilon) / 4
    n = 0
    while tail >= cut:
        tail *= lam
        n += 1
    return n


def _subset_layers(automaton: WeightedAutomaton, horizon: int, budget: int):
    """Forward unfolding of the advantage-subset game.

    A state is (q, g) where q is Eve's run state and g maps each state
    reachable on the word so far to the best run value minus Eve's run
    value, in absolute terms.  Layer k+1 merges states with equal maps.
    Returns the layers and, per layer, the per-symbol Eve choices as
    child indices into the next layer.
    """
    lam = automaton.discount
    start = (automaton.initial, ((automaton.initial, Fraction(0)),))
    layers: list[list[tuple[int, tuple]]] = [[start]]
    edges: list[list[list[list[int]]]] = []
    count = 1
    pow_step = Fraction(1)
    for _ in range(horizon):
        layer = layers[-1]
        nxt_index: dict[tuple[int, tuple], int] = {}
        nxt: list[tuple[int, tuple]] = []
        layer_edges: list[list[list[int]]] = []
        for q, g in layer:
            row: list[list[int]] = []
            for a in automaton.alphabet:
                ghat: dict[int, Fraction] = {}
                for s, adv in g:
                    for s2, w in automaton.moves(s, a):
                        cand = adv + pow_step * w
                        cur = ghat.get(s2)
                        if cur is None or cand > cur:
                            ghat[s2] = cand
                children: list[int] = []
                for t, wq in automaton.moves(q, a):
                    shift = pow_step * wq
                    gg = tuple(sorted((s2, val - shift) for s2, val in ghat.items()))
                    child = (t, gg)
                    j = nxt_index.get(child)
                    if j is None:
                        j = nxt_index[child] = len(nxt)
                        nxt.append(child)
                        count += 1
                        if count > budget:
                            raise BudgetExceeded(
                                f"subset game exceeds {budget} states", nodes=count
                            )
                    children.append(j)
                row.append(children)
            layer_edges.append(row)
        edges.append(layer_edges)
        layers.append(nxt)
        pow_step *= lam
    return layers, edges


def epsilon_gap(
    automaton: WeightedAutomaton,
    r,
    epsilon,
    budget: int = SUBSET_BUDGET,
) -> EpsilonGapReport:
    """Decide the epsilon-gap regret threshold problem.

    YES means the regret against word adversaries is at most r + epsilon;
    NO means it exceeds r.  Under the promise that the true regret is
    either <= r or > r + epsilon this decides the threshold exactly.
    Eve wins the horizon-bounded game iff at the horizon the best run's
    advantage never exceeds r + epsilon/2.
    """
    r = Fraction(r)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    horizon = gap_horizon(automaton, epsilon)
    layers, edges = _subset_layers(automaton, horizon, budget)
    bound = r + epsilon / 2
    win = [max(val for _, val in g) <= bound for _, g in layers[-1]]
    for step in range(horizon - 1, -1, -1):
        layer_edges = edges[step]
        win = [
            all(any(win[j] for j in children) for children in row)
            for row in layer_edges
        ]
    states = sum(len(layer) for layer in layers)
    return EpsilonGapReport(answer=win[0], horizon=horizon, states=states)


def _reachable_weight(automaton: WeightedAutomaton, supp: frozenset, cache: dict) -> Fraction:
    got = cache.get(supp)
    if got is not None:
        return got
    seen = set(supp)
    stack = list(supp)
    top = Fraction(0)
    while stack:
        u = stack.pop()
        for a in automaton.alphabet:
            for v, w in automaton.moves(u, a):
                if abs(w) > top:
                    top = abs(w)
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    cache[supp] = top
    return top


def _oracle_raw_word(automaton: WeightedAutomaton, depth: int, budget: int, wcache: dict):
    lam = automaton.discount
    layers, edges = _subset_layers(automaton, depth, budget)
    tail_pow = lam**depth / (1 - lam)
    zero = Fraction(0)
    vals: list[tuple[Fraction, Fraction]] = []
    for q, g in layers[-1]:
        gmax = max(val for _, val in g)
        tail = tail_pow * _reachable_weight(
            automaton, frozenset(s for s, _ in g), wcache
        )
        vals.append((max(gmax - 2 * tail, zero), gmax + 2 * tail))
    for step in range(depth - 1, -1, -1):
        layer_edges = edges[step]
        nxt: list[tuple[Fraction, Fraction]] = []
        for row in layer_edges:
            lo = hi = None
            for children in row:
                clo = min(vals[j][0] for j in children)
                chi = min(vals[j][1] for j in children)
                if lo is None or clo > lo:
                    lo = clo
                if hi is None or chi > hi:
                    hi = chi
            nxt.append((lo, hi))
        vals = nxt
    return vals[0]


def oracle_interval_word(
    automaton: WeightedAutomaton, depth: int, budget: int = SUBSET_BUDGET
) -> tuple[Fraction, Fraction]:
    """Certified interval around the regret against word adversaries.

    Minimax over the depth-bounded subset game with both run values
    bracketed by the discounted weight range still reachable from the
    leaf's support; successive depths are intersected so deeper calls
    always nest.  The width is at most 4*W*lambda^depth/(1-lambda), and
    the interval is a point once only zero-weight behavior is reachable.
    """
    if depth < 1:
        raise ValueError("oracle depth must be at least 1")
    wcache: dict = {}
    lo = hi = None
    for d in range(1, depth + 1):
        dlo, dhi = _oracle_raw_word(automaton, d, budget, wcache)
        if lo is None or dlo > lo:
            lo = dlo
        if hi is None or dhi < hi:
            hi = dhi
    return lo, hi
