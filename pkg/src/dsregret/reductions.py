"""Self-validating benchmark instances built from hardness gadgets.

Each generator wraps a classical decision problem (antagonistic value,
two vertex-disjoint paths, CNF satisfiability) into an arena or an
automaton whose regret answer is forced by the input instance.  The
expected answer is computed here by an elementary procedure that never
touches the game solvers, so running a solver on the artifact checks
both sides at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arena import FormatError, WeightedArena, WeightedAutomaton
from .rational import format_rational
from .values import antag_value


@dataclass(frozen=True)
class Digraph:
    """A directed graph with vertices 1..n, DIMACS style."""

    n: int
    arcs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v in self.arcs:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"arc ({u}, {v}) out of range 1..{self.n}")
            if (u, v) in seen:
                raise ValueError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))

    def successors(self, u: int) -> list[int]:
        return [v for (s, v) in self.arcs if s == u]


@dataclass(frozen=True)
class GeneratedInstance:
    """An artifact plus its independently checkable expected property."""

    artifact: object
    expected: dict
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        kind = "automaton" if isinstance(self.artifact, WeightedAutomaton) else "arena"
        return {"kind": kind, "expected": self.expected, "provenance": self.provenance}


def _fresh(name: str, taken) -> str:
    cand = name
    k = 2
    while cand in taken:
        cand = f"{name}_{k}"
        k += 1
    return cand


def aval_gadget(arena: WeightedArena) -> GeneratedInstance:
    """Wrap an arena so its regret encodes its antagonistic value.

    A new Eve initial vertex chooses between the old game and an Adam
    vertex offering a high branch worth K+1 and a punitive branch, with
    K = W/(1-lambda) bounding every discounted tail of the old game.
    The wrapped regret then equals lambda*(K + 1 - aVal) exactly.
    """
    lam = arena.discount
    k = arena.max_weight / (1 - lam)
    taken = set(arena.names)
    fresh = []
    for base in ("gadget_init", "gadget_choice", "gadget_high", "gadget_low"):
        name = _fresh(base, taken)
        taken.add(name)
        fresh.append(name)
    names = arena.names + tuple(fresh)
    eve = arena.eve + (True, False, False, False)
    start, choice, high, low = range(arena.n, arena.n + 4)
    edges = list(arena.edges())
    edges += [
        (start, arena.initial, Fraction(0)),
        (start, choice, Fraction(0)),
        (choice, high, k + 1),
        (choice, low, -3 * k - 2),
        (high, high, Fraction(0)),
        (low, low, Fraction(0)),
    ]
    wrapped = WeightedArena(names, eve, start, lam, edges)
    aval = antag_value(arena)[arena.initial]
    regret = lam * (k + 1 - aval)
    expected = {"regret_all": format_rational(regret)}
    provenance = {
        "construction": "aval-gadget",
        "check": "antagonistic value of the wrapped arena",
        "aval": format_rational(aval),
        "max_weight": format_rational(arena.max_weight),
        "K": format_rational(k),
    }
    return GeneratedInstance(wrapped, expected, provenance)


def _simple_paths(graph: Digraph, src: int, dst: int):
    path = [src]
    on_path = {src}

    def walk(u: int):
        if u == dst:
            yield tuple(path)
            return
        for v in graph.successors(u):
            if v in on_path:
                continue
            path.append(v)
            on_path.add(v)
            yield from walk(v)
            path.pop()
            on_path.remove(v)

    yield from walk(src)


def _reaches(graph: Digraph, src: int, dst: int, banned=frozenset()) -> bool:
    if src in banned:
        return False
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        if u == dst:
            return True
        for v in graph.successors(u):
            if v not in seen and v not in banned:
                seen.add(v)
                stack.append(v)
    return False


def has_disjoint_paths(graph: Digraph, s1: int, t1: int, s2: int, t2: int) -> bool:
    """Exhaustive search for paths s1->t1 and s2->t2 sharing no vertex."""
    for path in _simple_paths(graph, s1, t1):
        if _reaches(graph, s2, t2, banned=frozenset(path)):
            return True
    return False


def gen_2dp(
    graph: Digraph,
    s1: int,
    t1: int,
    s2: int,
    t2: int,
    lam: Fraction,
    r: Fraction,
) -> GeneratedInstance:
    """Arena whose positional zero-regret answer is the two-disjoint-paths answer.

    All graph vertices belong to Adam.  Each arc into the first target
    is replaced by an Eve checkpoint that either claims the target's
    reward loop or hands control to a delaying Adam vertex that can
    restart the hunt from the second source.  The loop weights are
    scaled so that regret stays at 0 exactly when every route to the
    first target cuts every route to the second.
    """
    lam = Fraction(lam)
    r = Fraction(r)
    if not 0 < lam < 1:
        raise ValueError("discount must be strictly between 0 and 1")
    if r < 0:
        raise ValueError("threshold must be nonnegative")
    if s1 == t1 or s2 == t2:
        raise ValueError("source and target must differ")

    # Normalize so both targets are distinct sinks: a target with
    # out-arcs, or shared between the two pairs, is redirected to a
    # fresh sink; every path to the old target extends by one arc, so
    # disjointness is unchanged.
    asked = {"s1": s1, "t1": t1, "s2": s2, "t2": t2}
    n = graph.n
    arcs = list(graph.arcs)
    split = {}
    for i, t in ((1, t1), (2, t2)):
        if graph.successors(t) or t1 == t2:
            n += 1
            arcs.append((t, n))
            split[i] = n
    t1 = split.get(1, t1)
    t2 = split.get(2, t2)
    work = Digraph(n, tuple(arcs))
    if not _reaches(work, s1, t1):
        raise ValueError("first target is unreachable from its source")
    if not _reaches(work, s2, t2):
        raise ValueError("second target is unreachable from its source")

    into_t1 = [(u, v) for u, v in work.arcs if v == t1]
    total = work.n + 2 * len(into_t1)
    alpha = (r + 1) / lam**total
    loop_a = (1 - lam) * alpha
    loop_b = (1 - lam) * alpha**2

    names = [f"v{i}" for i in range(1, work.n + 1)]
    eve = [False] * work.n
    edges: list[tuple[int, int, Fraction]] = []
    zero = Fraction(0)
    for idx, (u, v) in enumerate(work.arcs):
        if v == t1:
            pick = len(names)
            delay = pick + 1
            names += [f"pick{idx + 1}", f"delay{idx + 1}"]
            eve += [True, False]
            edges += [
                (u - 1, pick, zero),
                (pick, t1 - 1, zero),
                (pick, delay, zero),
                (delay, delay, zero),
                (delay, s2 - 1, zero),
            ]
        else:
            edges.append((u - 1, v - 1, zero))
    edges.append((t1 - 1, t1 - 1, loop_a))
    edges.append((t2 - 1, t2 - 1, loop_b))
    covered = {e[0] for e in edges}
    for i in range(work.n):
        if i not in covered:
            edges.append((i, i, zero))
    arena = WeightedArena(tuple(names), tuple(eve), s1 - 1, lam, edges)

    disjoint = has_disjoint_paths(work, s1, t1, s2, t2)
    expected: dict = {"zero_regret_positional": not disjoint}
    if disjoint:
        expected["regret_positional_exceeds"] = format_rational(r)
    provenance = {
        "construction": "2dp",
        "check": "exhaustive vertex-disjoint path search",
        "graph": {"n": graph.n, "arcs": [list(a) for a in graph.arcs]},
        "terminals": asked,
        "threshold": format_rational(r),
        "loop_weights": {
            "first_target": format_rational(loop_a),
            "second_target": format_rational(loop_b),
        },
    }
    return GeneratedInstance(arena, expected, provenance)


def satisfiable(cnf) -> bool:
    """Brute-force CNF satisfiability over all assignments."""
    variables = sorted({abs(lit) for clause in cnf for lit in clause})
    for mask in range(1 << len(variables)):
        value = {x: bool(mask >> i & 1) for i, x in enumerate(variables)}
        if all(
            any(value[abs(lit)] == (lit > 0) for lit in clause) for clause in cnf
        ):
            return True
    return False


SAT_SINK_REWARD = Fraction(1)


def gen_sat(cnf, lam: Fraction = Fraction(1, 2)) -> GeneratedInstance:
    """Automaton whose zero-regret answer mirrors satisfiability.

    Adam audits one clause by spelling i # i.  Eve, routed into the
    assignment half by the opening gadget, answers by picking a variable
    of clause i and a truth value for it; only a choice whose literal
    lies in the audited clause reaches the rewarding sink that the audit
    half reaches on its own.  The bailout sink's loop reward is a fixed
    positive constant; only its sign matters.
    """
    lam = Fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("discount must be strictly between 0 and 1")
    cnf = [tuple(clause) for clause in cnf]
    if not cnf:
        raise ValueError("need at least one clause")
    for clause in cnf:
        if not clause:
            raise ValueError("empty clause")
        if any(lit == 0 for lit in clause):
            raise ValueError("literal 0 is not allowed")
    variables = sorted({abs(lit) for clause in cnf for lit in clause})
    nclauses = len(cnf)

    alphabet = ["bail", "#"] + [str(i) for i in range(1, nclauses + 1)]
    states = ["start", "audit", "assign", "pick"]
    states += [f"pick_c{i}" for i in range(1, nclauses + 1)]
    states += [f"confirm_c{i}" for i in range(1, nclauses + 1)]
    states.append("choose")
    for x in variables:
        states += [f"x{x}", f"x{x}_true", f"x{x}_false"]
    states += ["goal", "dead", "bailout"]

    one = Fraction(1)
    zero = Fraction(0)
    trans: list[tuple[str, str, str, Fraction]] = []
    for a in alphabet:
        trans.append(("start", a, "audit", zero))
        trans.append(("start", a, "assign", zero))
        trans.append(("goal", a, "goal", one))
        trans.append(("bailout", a, "bailout", SAT_SINK_REWARD))
        trans.append(("dead", a, "dead", zero))
        if a != "bail":
            trans.append(("audit", a, "pick", zero))
            trans.append(("assign", a, "choose", zero))
    trans.append(("audit", "bail", "dead", zero))
    trans.append(("assign", "bail", "bailout", zero))
    for i, clause in enumerate(cnf, start=1):
        trans.append(("pick", str(i), f"pick_c{i}", one))
        trans.append((f"pick_c{i}", "#", f"confirm_c{i}", one))
        trans.append((f"confirm_c{i}", str(i), "goal", one))
        for x in sorted({abs(lit) for lit in clause}):
            trans.append(("choose", str(i), f"x{x}", one))
    for x in variables:
        trans.append((f"x{x}", "#", f"x{x}_true", one))
        trans.append((f"x{x}", "#", f"x{x}_false", one))
        for i, clause in enumerate(cnf, start=1):
            if x in clause:
                trans.append((f"x{x}_true", str(i), "goal", one))
            if -x in clause:
                trans.append((f"x{x}_false", str(i), "goal", one))

    have = {(q, a) for q, a, _, _ in trans}
    for q in states:
        for a in alphabet:
            if (q, a) not in have:
                trans.append((q, a, "dead", zero))

    automaton = WeightedAutomaton.build(states, alphabet, "start", lam, trans)
    sat = satisfiable(cnf)
    provenance = {
        "construction": "sat",
        "check": "brute-force satisfiability",
        "clauses": [list(clause) for clause in cnf],
        "variables": len(variables),
        "bailout_reward": format_rational(SAT_SINK_REWARD),
    }
    return GeneratedInstance(automaton, {"zero_regret_word": sat}, provenance)


def parse_digraph(text: str) -> Digraph:
    """DIMACS-style digraph: one `p digraph N M` line, then `a U V` arcs."""
    n = None
    arcs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise FormatError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "digraph":
                raise FormatError("problem line must be `p digraph N M`", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError("problem line needs integer sizes", lineno)
            if n < 1 or m < 0:
                raise FormatError("sizes must be positive", lineno)
        elif parts[0] == "a":
            if n is None:
                raise FormatError("arc before problem line", lineno)
            if len(parts) != 3:
                raise FormatError("arc line must be `a U V`", lineno)
            try:
                arcs.append((int(parts[1]), int(parts[2])))
            except ValueError:
                raise FormatError("arc endpoints must be integers", lineno)
        else:
            raise FormatError(f"unknown directive {parts[0]!r}", lineno)
    if n is None:
        raise FormatError("missing problem line")
    try:
        return Digraph(n, tuple(arcs))
    except ValueError as exc:
        raise FormatError(str(exc))


def parse_cnf(text: str):
    """DIMACS CNF: `p cnf VARS CLAUSES`, clauses as 0-terminated literal runs."""
    header = None
    lits: list[int] = []
    clauses: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise FormatError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("problem line must be `p cnf VARS CLAUSES`", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise FormatError("problem line needs integer sizes", lineno)
        else:
            if header is None:
                raise FormatError("clause before problem line", lineno)
            for tok in parts:
                try:
                    lit = int(tok)
                except ValueError:
                    raise FormatError(f"bad literal {tok!r}", lineno)
                if lit == 0:
                    if not lits:
                        raise FormatError("empty clause", lineno)
                    clauses.append(tuple(lits))
                    lits = []
                else:
                    if abs(lit) > header[0]:
                        raise FormatError(f"literal {lit} exceeds variable count", lineno)
                    lits.append(lit)
    if header is None:
        raise FormatError("missing problem line")
    if lits:
        clauses.append(tuple(lits))
    if len(clauses) != header[1]:
        raise FormatError(
            f"header declares {header[1]} clauses, found {len(clauses)}"
        )
    return clauses
