"""Weighted arenas and automata with exact rational data.

Both file formats are UTF-8 and line oriented.  A line whose first
non-blank character is ``#`` is a comment; blank lines are ignored.
Tokens are whitespace separated.  Rationals are written ``p/q`` in
lowest terms, or as a bare integer; decimals are never accepted.

Arena files::

    lambda 9/10
    eve v_I
    adam x v y
    init v_I
    edge v_I x 1

Automaton files::

    lambda 49/50
    alphabet # H L
    state q_init initial
    state q_S
    trans q_init # q_S 0

Vertex, state and symbol order is declaration order; that order is the
canonical tie break everywhere in this package.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .rational import format_rational, parse_rational

__all__ = [
    "FormatError",
    "WeightedArena",
    "WeightedAutomaton",
    "PlayPrefix",
    "LassoPlay",
    "parse_arena",
    "parse_automaton",
    "format_arena",
    "format_automaton",
]

_TOKEN_RE = re.compile(r"\S+")


class FormatError(ValueError):
    """Raised for syntactic or semantic problems in arena/automaton data."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}: " if column is None else f"line {line}, column {column}: "
        super().__init__(where + message)


def _tokenize(raw: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in _TOKEN_RE.finditer(raw)]


def _rational_token(token: str, line: int, column: int) -> Fraction:
    try:
        return parse_rational(token)
    except ValueError:
        raise FormatError(f"expected a rational p/q, got {token!r}", line, column) from None


def _check_discount(value: Fraction, line: int | None = None) -> Fraction:
    if not 0 < value < 1:
        raise FormatError(f"discount factor must satisfy 0 < lambda < 1, got {value}", line)
    return value


class WeightedArena:
    """A finite weighted game arena with Eve and Adam vertices.

    Vertices are indexed in declaration order.  Successor lists are kept
    sorted by target index so that iteration order is the canonical tie
    break.  Weights are exact Fractions.
    """

    def __init__(
        self,
        names: tuple[str, ...],
        eve: tuple[bool, ...],
        initial: int,
        discount: Fraction,
        edge_list: list[tuple[int, int, Fraction]],
    ):
        self.names = names
        self.eve = eve
        self.initial = initial
        self.discount = _check_discount(Fraction(discount))
        self.index = {name: i for i, name in enumerate(names)}
        if len(self.index) != len(names):
            raise FormatError("duplicate vertex name")
        n = len(names)
        if not 0 <= initial < n:
            raise FormatError("initial vertex out of range")
        weights: dict[tuple[int, int], Fraction] = {}
        for u, v, w in edge_list:
            if not (0 <= u < n and 0 <= v < n):
                raise FormatError("edge endpoint out of range")
            if (u, v) in weights:
                raise FormatError(f"duplicate edge {names[u]} -> {names[v]}")
            weights[(u, v)] = Fraction(w)
        succ: list[tuple[tuple[int, Fraction], ...]] = []
        for u in range(n):
            out = tuple(sorted((v, w) for (uu, v), w in weights.items() if uu == u))
            if not out:
                raise FormatError(f"vertex {names[u]} has no outgoing edge")
            if eve[u] and len(out) < 2:
                raise FormatError(f"Eve vertex {names[u]} needs out-degree >= 2")
            succ.append(out)
        self.succ = tuple(succ)
        self._weights = weights
        self.max_weight = max(abs(w) for w in weights.values())

    @classmethod
    def build(
        cls,
        eve_names,
        adam_names,
        initial: str,
        discount,
        edges,
    ) -> "WeightedArena":
        """Construct an arena from names, in the order given."""
        names = tuple(eve_names) + tuple(adam_names)
        eve = tuple([True] * len(tuple(eve_names)) + [False] * len(tuple(adam_names)))
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise FormatError("duplicate vertex name")
        if initial not in index:
            raise FormatError(f"unknown initial vertex {initial!r}")
        edge_list = []
        for u, v, w in edges:
            if u not in index:
                raise FormatError(f"unknown vertex {u!r}")
            if v not in index:
                raise FormatError(f"unknown vertex {v!r}")
            edge_list.append((index[u], index[v], Fraction(w)))
        return cls(names, eve, index[initial], Fraction(discount), edge_list)

    # Convenience accessors.  Internal code works with indices only.
    @property
    def n(self) -> int:
        return len(self.names)

    def is_eve(self, v: int) -> bool:
        return self.eve[v]

    def out(self, u: int) -> tuple[tuple[int, Fraction], ...]:
        return self.succ[u]

    def weight(self, u: int, v: int) -> Fraction:
        return self._weights[(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._weights

    def edges(self):
        """Iterate (u, v, weight) with u ascending, then v."""
        for u in range(self.n):
            for v, w in self.succ[u]:
                yield u, v, w

    def edge_count(self) -> int:
        return len(self._weights)

    def eve_vertices(self):
        return (v for v in range(self.n) if self.eve[v])

    def adam_vertices(self):
        return (v for v in range(self.n) if not self.eve[v])

    def __repr__(self):
        return f"WeightedArena({self.n} vertices, {len(self._weights)} edges, lambda={self.discount})"


class WeightedAutomaton:
    """A total nondeterministic weighted automaton over a finite alphabet."""

    def __init__(
        self,
        states: tuple[str, ...],
        alphabet: tuple[str, ...],
        initial: int,
        discount: Fraction,
        transitions: list[tuple[int, str, int, Fraction]],
    ):
        self.states = states
        self.alphabet = alphabet
        self.initial = initial
        self.discount = _check_discount(Fraction(discount))
        self.index = {name: i for i, name in enumerate(states)}
        if len(self.index) != len(states):
            raise FormatError("duplicate state name")
        if len(set(alphabet)) != len(alphabet):
            raise FormatError("duplicate alphabet symbol")
        if not alphabet:
            raise FormatError("alphabet must be nonempty")
        n = len(states)
        if not 0 <= initial < n:
            raise FormatError("initial state out of range")
        seen: dict[tuple[int, str, int], Fraction] = {}
        for q, a, r, w in transitions:
            if a not in alphabet:
                raise FormatError(f"unknown symbol {a!r}")
            if (q, a, r) in seen:
                raise FormatError(f"duplicate transition ({states[q]}, {a}, {states[r]})")
            seen[(q, a, r)] = Fraction(w)
        table: dict[tuple[int, str], tuple[tuple[int, Fraction], ...]] = {}
        for q in range(n):
            for a in alphabet:
                out = tuple(sorted((r, w) for (qq, aa, r), w in seen.items() if qq == q and aa == a))
                if not out:
                    raise FormatError(f"missing transition for ({states[q]}, {a})")
                table[(q, a)] = out
        self.trans = table
        self._weights = seen
        self.max_weight = max(abs(w) for w in seen.values()) if seen else Fraction(0)

    @classmethod
    def build(cls, state_names, alphabet, initial: str, discount, transitions) -> "WeightedAutomaton":
        names = tuple(state_names)
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise FormatError("duplicate state name")
        if initial not in index:
            raise FormatError(f"unknown initial state {initial!r}")
        tr = []
        for q, a, r, w in transitions:
            if q not in index or r not in index:
                raise FormatError(f"unknown state in transition ({q}, {a}, {r})")
            tr.append((index[q], a, index[r], Fraction(w)))
        return cls(names, tuple(alphabet), index[initial], Fraction(discount), tr)

    @property
    def n(self) -> int:
        return len(self.states)

    def moves(self, q: int, a: str) -> tuple[tuple[int, Fraction], ...]:
        return self.trans[(q, a)]

    def weight(self, q: int, a: str, r: int) -> Fraction:
        return self._weights[(q, a, r)]

    def __repr__(self):
        return (
            f"WeightedAutomaton({self.n} states, {len(self.alphabet)} symbols, "
            f"lambda={self.discount})"
        )


class PlayPrefix:
    """A finite play prefix with its running discounted sum.

    ``prefix.partial[k]`` is the discounted sum of the first k edge
    weights, so a window value over positions i..j costs one division.
    """

    __slots__ = ("arena", "vertices", "partial")

    def __init__(self, arena: WeightedArena, vertices: tuple[int, ...], partial: tuple[Fraction, ...]):
        self.arena = arena
        self.vertices = vertices
        self.partial = partial

    @classmethod
    def start(cls, arena: WeightedArena, v: int | None = None) -> "PlayPrefix":
        if v is None:
            v = arena.initial
        return cls(arena, (v,), (Fraction(0),))

    @classmethod
    def from_names(cls, arena: WeightedArena, names) -> "PlayPrefix":
        p = None
        for name in names:
            if name not in arena.index:
                raise FormatError(f"unknown vertex {name!r}")
            v = arena.index[name]
            p = cls.start(arena, v) if p is None else p.extend(v)
        if p is None:
            raise FormatError("empty play prefix")
        return p

    def extend(self, v: int) -> "PlayPrefix":
        u = self.vertices[-1]
        if not self.arena.has_edge(u, v):
            raise FormatError(f"no edge {self.arena.names[u]} -> {self.arena.names[v]}")
        d = len(self.vertices) - 1
        w = self.arena.weight(u, v)
        new_sum = self.partial[-1] + self.arena.discount**d * w
        return PlayPrefix(self.arena, self.vertices + (v,), self.partial + (new_sum,))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def last(self) -> int:
        return self.vertices[-1]

    def discounted(self, i: int = 0, j: int | None = None) -> Fraction:
        """Discounted value of the window rho[i..j], rebased to position i."""
        if j is None:
            j = len(self.vertices) - 1
        if not 0 <= i <= j < len(self.vertices):
            raise IndexError("window out of range")
        return (self.partial[j] - self.partial[i]) / self.arena.discount**i


class LassoPlay:
    """An infinite play given as a finite stem followed by a repeated cycle."""

    __slots__ = ("arena", "stem", "cycle", "_cycle_values")

    def __init__(self, arena: WeightedArena, stem: tuple[int, ...], cycle: tuple[int, ...]):
        if not cycle:
            raise FormatError("lasso cycle must be nonempty")
        self.arena = arena
        self.stem = tuple(stem)
        self.cycle = tuple(cycle)
        seq = self.stem + self.cycle
        for a, b in zip(seq, seq[1:]):
            if not arena.has_edge(a, b):
                raise FormatError(f"no edge {arena.names[a]} -> {arena.names[b]}")
        if not arena.has_edge(self.cycle[-1], self.cycle[0]):
            raise FormatError(
                f"no edge {arena.names[self.cycle[-1]]} -> {arena.names[self.cycle[0]]}"
            )
        self._cycle_values: list[Fraction | None] = [None] * len(self.cycle)

    @classmethod
    def from_names(cls, arena: WeightedArena, stem_names, cycle_names) -> "LassoPlay":
        def idx(name):
            if name not in arena.index:
                raise FormatError(f"unknown vertex {name!r}")
            return arena.index[name]

        return cls(arena, tuple(idx(s) for s in stem_names), tuple(idx(c) for c in cycle_names))

    def vertex(self, i: int) -> int:
        if i < len(self.stem):
            return self.stem[i]
        return self.cycle[(i - len(self.stem)) % len(self.cycle)]

    def _cycle_value(self, k: int) -> Fraction:
        cached = self._cycle_values[k]
        if cached is not None:
            return cached
        lam = self.arena.discount
        ell = len(self.cycle)
        total = Fraction(0)
        for j in range(ell):
            a = self.cycle[(k + j) % ell]
            b = self.cycle[(k + j + 1) % ell]
            total += lam**j * self.arena.weight(a, b)
        value = total / (1 - lam**ell)
        self._cycle_values[k] = value
        return value

    def suffix_value(self, i: int) -> Fraction:
        """Disc of the infinite suffix starting at position i, rebased to i."""
        lam = self.arena.discount
        if i >= len(self.stem):
            return self._cycle_value((i - len(self.stem)) % len(self.cycle))
        total = Fraction(0)
        for j in range(i, len(self.stem)):
            total += lam ** (j - i) * self.arena.weight(self.vertex(j), self.vertex(j + 1))
        return total + lam ** (len(self.stem) - i) * self._cycle_value(0)


def parse_arena(text: str) -> WeightedArena:
    """Parse the line-oriented arena format, with precise error locations."""
    discount: Fraction | None = None
    order: list[str] = []
    owner: dict[str, bool] = {}
    initial: str | None = None
    edges: list[tuple[str, str, Fraction]] = []
    edge_seen: set[tuple[str, str]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(raw)
        if not tokens or tokens[0][0].startswith("#"):
            continue
        head, col = tokens[0]
        args = tokens[1:]
        if head == "lambda":
            if discount is not None:
                raise FormatError("duplicate lambda line", lineno, col)
            if len(args) != 1:
                raise FormatError("lambda takes exactly one rational", lineno, col)
            discount = _check_discount(_rational_token(args[0][0], lineno, args[0][1]), lineno)
        elif head in ("eve", "adam"):
            if not args:
                raise FormatError(f"{head} line needs at least one name", lineno, col)
            for name, c in args:
                if name in owner:
                    raise FormatError(f"vertex {name!r} declared twice", lineno, c)
                owner[name] = head == "eve"
                order.append(name)
        elif head == "init":
            if len(args) != 1:
                raise FormatError("init takes exactly one vertex name", lineno, col)
            if initial is not None:
                raise FormatError("duplicate init line", lineno, col)
            initial = args[0][0]
        elif head == "edge":
            if len(args) != 3:
                raise FormatError("edge takes source, target, weight", lineno, col)
            (u, cu), (v, cv), (wtok, cw) = args
            if u not in owner:
                raise FormatError(f"unknown vertex {u!r}", lineno, cu)
            if v not in owner:
                raise FormatError(f"unknown vertex {v!r}", lineno, cv)
            if (u, v) in edge_seen:
                raise FormatError(f"duplicate edge {u} -> {v}", lineno, cu)
            edge_seen.add((u, v))
            edges.append((u, v, _rational_token(wtok, lineno, cw)))
        else:
            raise FormatError(f"unknown directive {head!r}", lineno, col)

    if discount is None:
        raise FormatError("missing lambda line")
    if initial is None:
        raise FormatError("missing init line")
    if initial not in owner:
        raise FormatError(f"unknown initial vertex {initial!r}")
    names = tuple(order)
    index = {name: i for i, name in enumerate(names)}
    eve = tuple(owner[name] for name in names)
    edge_list = [(index[u], index[v], w) for u, v, w in edges]
    return WeightedArena(names, eve, index[initial], discount, edge_list)


def parse_automaton(text: str) -> WeightedAutomaton:
    """Parse the line-oriented automaton format."""
    discount: Fraction | None = None
    alphabet: list[str] | None = None
    states: list[str] = []
    initial: str | None = None
    transitions: list[tuple[str, str, str, Fraction]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(raw)
        if not tokens or tokens[0][0].startswith("#"):
            continue
        head, col = tokens[0]
        args = tokens[1:]
        if head == "lambda":
            if discount is not None:
                raise FormatError("duplicate lambda line", lineno, col)
            if len(args) != 1:
                raise FormatError("lambda takes exactly one rational", lineno, col)
            discount = _check_discount(_rational_token(args[0][0], lineno, args[0][1]), lineno)
        elif head == "alphabet":
            if alphabet is not None:
                raise FormatError("duplicate alphabet line", lineno, col)
            if not args:
                raise FormatError("alphabet needs at least one symbol", lineno, col)
            alphabet = [a for a, _ in args]
        elif head == "state":
            if not args:
                raise FormatError("state line needs a name", lineno, col)
            name, c = args[0]
            if name in states:
                raise FormatError(f"state {name!r} declared twice", lineno, c)
            states.append(name)
            rest = args[1:]
            if rest:
                if len(rest) != 1 or rest[0][0] != "initial":
                    raise FormatError("state takes a name and optional 'initial'", lineno, rest[0][1])
                if initial is not None:
                    raise FormatError("two states marked initial", lineno, rest[0][1])
                initial = name
        elif head == "trans":
            if len(args) != 4:
                raise FormatError("trans takes state, symbol, state, weight", lineno, col)
            (q, cq), (a, _), (r, cr), (wtok, cw) = args
            transitions.append((q, a, r, _rational_token(wtok, lineno, cw)))
            if q not in states:
                raise FormatError(f"unknown state {q!r}", lineno, cq)
            if r not in states:
                raise FormatError(f"unknown state {r!r}", lineno, cr)
        else:
            raise FormatError(f"unknown directive {head!r}", lineno, col)

    if discount is None:
        raise FormatError("missing lambda line")
    if alphabet is None:
        raise FormatError("missing alphabet line")
    if initial is None:
        raise FormatError("no state marked initial")
    return WeightedAutomaton.build(states, alphabet, initial, discount, transitions)


def format_arena(arena: WeightedArena) -> str:
    """Canonical text form; format(parse(format(a))) == format(a)."""
    lines = [f"lambda {format_rational(arena.discount)}"]
    eve = [v for v in range(arena.n) if arena.eve[v]]
    adam = [v for v in range(arena.n) if not arena.eve[v]]
    if eve:
        lines.append("eve " + " ".join(arena.names[v] for v in eve))
    if adam:
        lines.append("adam " + " ".join(arena.names[v] for v in adam))
    lines.append(f"init {arena.names[arena.initial]}")
    # edges follow the emitted vertex order so the text is a fixed point
    pos = {v: i for i, v in enumerate(eve + adam)}
    for u, v, w in sorted(arena.edges(), key=lambda e: (pos[e[0]], pos[e[1]])):
        lines.append(f"edge {arena.names[u]} {arena.names[v]} {format_rational(w)}")
    return "\n".join(lines) + "\n"


def format_automaton(aut: WeightedAutomaton) -> str:
    lines = [f"lambda {format_rational(aut.discount)}"]
    lines.append("alphabet " + " ".join(aut.alphabet))
    for i, name in enumerate(aut.states):
        lines.append(f"state {name} initial" if i == aut.initial else f"state {name}")
    for q in range(aut.n):
        for a in aut.alphabet:
            for r, w in aut.trans[(q, a)]:
                lines.append(f"trans {aut.states[q]} {a} {aut.states[r]} {format_rational(w)}")
    return "\n".join(lines) + "\n"
