"""Exact policy iteration for discounted optimization on finite graphs.

Vertices are 0..n-1.  Each vertex has a nonempty list of options; an
option is a pair (target, weight) following an edge, or (None, value)
cashing out at a fixed value with no continuation.  Policy evaluation
solves each policy's chains and lassos in closed form, so every value
is an exact Fraction.
"""

from __future__ import annotations

from fractions import Fraction

Option = tuple[int | None, Fraction]


def option_value(opt: Option, vals, lam: Fraction) -> Fraction:
    t, w = opt
    if t is None:
        return w
    return w + lam * vals[t]


def evaluate_policy(options, choice, lam: Fraction):
    """Value of the positional policy `choice`, one option index per vertex."""
    n = len(options)
    vals: list[Fraction | None] = [None] * n
    for start in range(n):
        if vals[start] is not None:
            continue
        path: list[int] = []
        pos: dict[int, int] = {}
        v = start
        while vals[v] is None and v not in pos:
            t, w = options[v][choice[v]]
            if t is None:
                vals[v] = w
                break
            pos[v] = len(path)
            path.append(v)
            v = t
        if vals[v] is None:
            # the walk closed a cycle at v; S / (1 - lam^len) in closed form
            total = Fraction(0)
            factor = Fraction(1)
            for u in path[pos[v] :]:
                total += factor * options[u][choice[u]][1]
                factor *= lam
            vals[v] = total / (1 - factor)
        for u in reversed(path):
            t, w = options[u][choice[u]]
            vals[u] = w + lam * vals[t]
    return vals


def solve_one_player(options, lam: Fraction, maximize: bool):
    """Optimal values and a canonical optimal policy for a single player."""
    n = len(options)
    choice = [0] * n
    while True:
        vals = evaluate_policy(options, choice, lam)
        changed = False
        for v in range(n):
            best = None
            best_i = None
            for i, opt in enumerate(options[v]):
                x = option_value(opt, vals, lam)
                if best is None or (x > best if maximize else x < best):
                    best, best_i = x, i
            # switch only on strict improvement; ties keep the incumbent
            if (best > vals[v]) if maximize else (best < vals[v]):
                choice[v] = best_i
                changed = True
        if not changed:
            return vals, choice


def solve_two_player(is_max, options, lam: Fraction):
    """Exact value of the discounted game, maximizer vs minimizer.

    Strategy improvement on the maximizer's positional choices against
    exact minimizer best responses.
    """
    n = len(options)
    max_choice = [0] * n
    while True:
        frozen = [
            [options[v][max_choice[v]]] if is_max[v] else options[v] for v in range(n)
        ]
        vals, _ = solve_one_player(frozen, lam, maximize=False)
        changed = False
        for v in range(n):
            if not is_max[v]:
                continue
            best = vals[v]
            best_i = None
            for i, opt in enumerate(options[v]):
                x = option_value(opt, vals, lam)
                if x > best:
                    best, best_i = x, i
            if best_i is not None:
                max_choice[v] = best_i
                changed = True
        if not changed:
            return vals


def greedy_argbest(options, vals, lam: Fraction, maximize: bool) -> list[int]:
    """First option index attaining the Bellman optimum at each vertex."""
    out = []
    for opts in options:
        best = None
        best_i = 0
        for i, opt in enumerate(opts):
            x = option_value(opt, vals, lam)
            if best is None or (x > best if maximize else x < best):
                best, best_i = x, i
        out.append(best_i)
    return out


def reachable_from(successors, start) -> set[int]:
    """Vertices reachable from start (start included) over successor lists."""
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in successors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen
