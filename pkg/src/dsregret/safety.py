"""Safety games with bad edges, solved by backward attractor.

The protagonist (Eve) wins iff she can avoid ever traversing a bad
edge.  Works on any finite graph given as successor lists, so the
regret modules reuse it on knowledge arenas.  Linear time via a
worklist with per-vertex counters; no edge subdivision.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["SafetyResult", "solve_safety"]


@dataclass
class SafetyResult:
    eve_wins: bool
    attractor: frozenset
    eve_choice: dict
    adam_choice: dict

    @property
    def winner(self) -> str:
        return "eve" if self.eve_wins else "adam"

    @property
    def witness(self) -> dict:
        return self.eve_choice if self.eve_wins else self.adam_choice


def solve_safety(is_eve, succ, bad, initial) -> SafetyResult:
    """Solve the safety game (succ, bad) from `initial`.

    is_eve: per-vertex bool; succ: per-vertex target lists in canonical
    order; bad: set of (u, v) edge pairs Adam wants traversed.
    """
    n = len(succ)
    att = [False] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    remaining = [0] * n
    work: list[int] = []
    has_bad_edge = [False] * n
    for u in range(n):
        good = []
        for v in succ[u]:
            if (u, v) in bad:
                has_bad_edge[u] = True
            else:
                good.append(v)
        for v in good:
            preds[v].append(u)
        if is_eve[u]:
            remaining[u] = len(good)
            if not good:
                att[u] = True
                work.append(u)
        elif has_bad_edge[u]:
            att[u] = True
            work.append(u)

    trigger: dict[int, int] = {}
    qi = 0
    while qi < len(work):
        v = work[qi]
        qi += 1
        for u in preds[v]:
            if att[u]:
                continue
            if is_eve[u]:
                remaining[u] -= 1
                if remaining[u] == 0:
                    att[u] = True
                    work.append(u)
            else:
                att[u] = True
                trigger[u] = v
                work.append(u)

    eve_choice: dict[int, int] = {}
    adam_choice: dict[int, int] = {}
    for u in range(n):
        if is_eve[u]:
            pick = succ[u][0]
            if not att[u]:
                for v in succ[u]:
                    if (u, v) not in bad and not att[v]:
                        pick = v
                        break
            eve_choice[u] = pick
        else:
            if att[u] and has_bad_edge[u]:
                pick = next(v for v in succ[u] if (u, v) in bad)
            elif att[u] and u in trigger:
                pick = trigger[u]
            else:
                pick = succ[u][0]
            adam_choice[u] = pick

    return SafetyResult(
        eve_wins=not att[initial],
        attractor=frozenset(i for i in range(n) if att[i]),
        eve_choice=eve_choice,
        adam_choice=adam_choice,
    )
