"""Finite automata over event alphabets and the language operations on them.

The accepted language of a :class:`TraceAutomaton` is the set of behavior
traces a development-phase model allows.  Every decision procedure here
(inclusion, emptiness, equivalence) works on that language, never on the
automaton's shape.

Traces are plain tuples of event names; the empty tuple is the empty trace.
"""

from __future__ import annotations

import contextlib
import re
from collections import deque
from contextvars import ContextVar
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator

from .errors import (
    AlphabetMismatchError,
    AutomatonSemanticError,
    AutomatonSyntaxError,
    ForeignSymbolError,
    ResourceLimitError,
)

Trace = tuple[str, ...]

DEFAULT_STATE_BUDGET = 1_000_000

_state_budget: ContextVar[int] = ContextVar("state_budget", default=DEFAULT_STATE_BUDGET)

_TOKEN = re.compile(r"[^\s,]+")


@contextlib.contextmanager
def state_budget(limit: int):
    """Cap the number of states any subset construction may build in this context."""
    if limit < 1:
        raise ValueError("state budget must be positive")
    token = _state_budget.set(limit)
    try:
        yield
    finally:
        _state_budget.reset(token)


def format_trace(trace: Trace) -> str:
    """Render a trace the way log files write it (``-`` for the empty trace)."""
    return " ".join(trace) if trace else "-"


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise AutomatonSemanticError("alphabet must not be empty")
        seen = set()
        for s in self.symbols:
            if not isinstance(s, str) or not _TOKEN.fullmatch(s):
                raise AutomatonSemanticError(f"invalid event symbol {s!r}")
            if s in seen:
                raise AutomatonSemanticError(f"duplicate event symbol {s!r}")
            seen.add(s)

    @classmethod
    def of(cls, *symbols: str) -> "Alphabet":
        return cls(tuple(symbols))

    @cached_property
    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.symbols)}

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.index

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def same_symbols(self, other: "Alphabet") -> bool:
        return set(self.symbols) == set(other.symbols)

    def check_trace(self, trace: Iterable[str]) -> Trace:
        trace = tuple(trace)
        for event in trace:
            if event not in self.index:
                raise ForeignSymbolError(event)
        return trace

    def sort_key(self, trace: Trace) -> tuple[int, tuple[int, ...]]:
        """Shortlex key: length first, then declaration order of symbols."""
        return len(trace), tuple(self.index[e] for e in trace)


class WitnessKind(str, Enum):
    DIFFERENCE = "accepted-by-left-not-right"
    SAMPLE = "accepted-sample"


@dataclass(frozen=True)
class Witness:
    trace: Trace
    kind: WitnessKind

    def __str__(self) -> str:
        return format_trace(self.trace)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a decision procedure.

    ``holds`` is the answer to the question asked (``is_empty`` asks "is it
    empty?", ``includes`` asks "is it included?").  When the answer is no,
    ``witness`` carries the shortlex-least trace demonstrating it.
    """

    holds: bool
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class TraceAutomaton:
    """Nondeterministic finite automaton with a single initial state."""

    alphabet: Alphabet
    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    transitions: frozenset[tuple[str, str, str]]

    def __post_init__(self):
        state_set = set(self.states)
        if len(state_set) != len(self.states):
            raise AutomatonSemanticError("duplicate state names")
        if self.initial not in state_set:
            raise AutomatonSemanticError(f"initial state {self.initial!r} is not declared")
        for q in sorted(self.accepting - state_set):
            raise AutomatonSemanticError(f"accepting state {q!r} is not declared")
        for src, sym, dst in sorted(self.transitions):
            for q in (src, dst):
                if q not in state_set:
                    raise AutomatonSemanticError(f"transition uses undeclared state {q!r}")
            if sym not in self.alphabet:
                raise AutomatonSemanticError(f"transition uses unknown symbol {sym!r}")

    @classmethod
    def build(cls, alphabet, states, initial, accepting, transitions) -> "TraceAutomaton":
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        return cls(
            alphabet,
            tuple(states),
            initial,
            frozenset(accepting),
            frozenset(tuple(t) for t in transitions),
        )

    @cached_property
    def delta(self) -> dict[tuple[str, str], tuple[str, ...]]:
        table: dict[tuple[str, str], list[str]] = {}
        for src, sym, dst in self.transitions:
            table.setdefault((src, sym), []).append(dst)
        order = {q: i for i, q in enumerate(self.states)}
        return {k: tuple(sorted(v, key=order.__getitem__)) for k, v in table.items()}

    @cached_property
    def is_deterministic(self) -> bool:
        return all(len(v) == 1 for v in self.delta.values())

    def step(self, current: frozenset[str], symbol: str) -> frozenset[str]:
        delta = self.delta
        return frozenset(q for p in current for q in delta.get((p, symbol), ()))

    @cached_property
    def coreachable(self) -> frozenset[str]:
        """States from which some accepting state can be reached."""
        back: dict[str, set[str]] = {}
        for src, _, dst in self.transitions:
            back.setdefault(dst, set()).add(src)
        seen = set(self.accepting)
        stack = list(self.accepting)
        while stack:
            q = stack.pop()
            for p in back.get(q, ()):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return frozenset(seen)

    def __str__(self) -> str:
        return serialize(self)


# --- file format -----------------------------------------------------------

_HEADERS = ("alphabet", "states", "initial", "accepting")
_TRANSITION = re.compile(r"^(\S+)\s+-(\S+)->\s+(\S+)$")


def _split_list(body: str, lineno: int, offset: int) -> list[str]:
    if not body.strip():
        return []
    items = []
    col = offset
    for raw in body.split(","):
        item = raw.strip()
        if not item or not _TOKEN.fullmatch(item):
            lead = len(raw) - len(raw.lstrip())
            raise AutomatonSyntaxError(f"malformed list item {raw.strip()!r}", lineno, col + lead + 1)
        items.append(item)
        col += len(raw) + 1
    return items


def parse_automaton(text: str) -> TraceAutomaton:
    """Parse automaton-file text into a validated :class:`TraceAutomaton`.

    Raises :class:`AutomatonSyntaxError` (with line and column) when the text
    does not follow the grammar, and :class:`AutomatonSemanticError` when it
    parses but refers to undeclared states or symbols.
    """
    header: dict[str, list[str]] = {}
    transitions: list[tuple[str, str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        line = line.strip()
        if len(header) < len(_HEADERS):
            expected = _HEADERS[len(header)]
            key, sep, body = line.partition(":")
            if not sep or key.strip() != expected:
                raise AutomatonSyntaxError(f"expected '{expected}:' header", lineno, indent + 1)
            header[expected] = _split_list(body, lineno, indent + len(key) + 1)
            continue
        m = _TRANSITION.match(line)
        if m is None:
            raise AutomatonSyntaxError("expected transition 'SRC -SYMBOL-> DST'", lineno, indent + 1)
        transitions.append((m.group(1), m.group(2), m.group(3), lineno))

    if len(header) < len(_HEADERS):
        missing = _HEADERS[len(header)]
        if missing == "initial":
            raise AutomatonSemanticError("missing initial state")
        raise AutomatonSyntaxError(f"missing '{missing}:' header", len(text.splitlines()) + 1)

    initial = header["initial"]
    if len(initial) != 1:
        if not initial:
            raise AutomatonSemanticError("missing initial state")
        raise AutomatonSemanticError("exactly one initial state is required")
    alphabet = Alphabet(tuple(header["alphabet"]))
    states = header["states"]
    declared = set(states)
    for src, sym, dst, lineno in transitions:
        for q in (src, dst):
            if q not in declared:
                raise AutomatonSemanticError(f"line {lineno}: undeclared state {q!r}")
        if sym not in alphabet:
            raise AutomatonSemanticError(f"line {lineno}: unknown symbol {sym!r}")
    return TraceAutomaton.build(
        alphabet, states, initial[0], header["accepting"],
        [(s, a, d) for s, a, d, _ in transitions],
    )


def serialize(aut: TraceAutomaton) -> str:
    """Write ``aut`` in the automaton file format, keeping its state names."""
    order = {q: i for i, q in enumerate(aut.states)}
    sym = aut.alphabet.index
    lines = [
        "alphabet: " + ", ".join(aut.alphabet),
        "states: " + ", ".join(aut.states),
        "initial: " + aut.initial,
        "accepting: " + ", ".join(sorted(aut.accepting, key=order.__getitem__)),
    ]
    for src, a, dst in sorted(aut.transitions, key=lambda t: (order[t[0]], sym[t[1]], order[t[2]])):
        lines.append(f"{src} -{a}-> {dst}")
    return "\n".join(lines) + "\n"


def canonical(aut: TraceAutomaton) -> str:
    """Serialization of the minimal DFA; identical for language-equivalent inputs."""
    return serialize(minimize(aut))


# --- membership ------------------------------------------------------------

def accepts(aut: TraceAutomaton, trace: Iterable[str]) -> bool:
    trace = aut.alphabet.check_trace(trace)
    current = frozenset((aut.initial,))
    for event in trace:
        current = aut.step(current, event)
        if not current:
            return False
    return not current.isdisjoint(aut.accepting)


# --- subset construction ---------------------------------------------------

class _Budget:
    def __init__(self):
        self.limit = _state_budget.get()
        self.used = 0

    def charge(self):
        self.used += 1
        if self.used > self.limit:
            raise ResourceLimitError(self.limit)


def require_same_alphabet(a: TraceAutomaton, b: TraceAutomaton):
    if not a.alphabet.same_symbols(b.alphabet):
        raise AlphabetMismatchError(a.alphabet.symbols, b.alphabet.symbols)


def _explore(alphabet: Alphabet, start, successor, accepting, prefix: str) -> TraceAutomaton:
    """Breadth-first construction of a complete DFA from an implicit one.

    ``start`` is a hashable initial node, ``successor(node, symbol)`` the next
    node, ``accepting(node)`` its acceptance.  States are named
    ``prefix0, prefix1, ...`` in discovery order.
    """
    budget = _Budget()
    budget.charge()
    names = {start: f"{prefix}0"}
    queue = deque([start])
    transitions = []
    final = []
    while queue:
        node = queue.popleft()
        if accepting(node):
            final.append(names[node])
        for a in alphabet:
            nxt = successor(node, a)
            if nxt not in names:
                budget.charge()
                names[nxt] = f"{prefix}{len(names)}"
                queue.append(nxt)
            transitions.append((names[node], a, names[nxt]))
    return TraceAutomaton.build(alphabet, names.values(), f"{prefix}0", final, transitions)


def determinize(aut: TraceAutomaton) -> TraceAutomaton:
    """Complete DFA for ``aut`` via subset construction (a sink is kept)."""
    return _explore(
        aut.alphabet,
        frozenset((aut.initial,)),
        aut.step,
        lambda s: not s.isdisjoint(aut.accepting),
        "d",
    )


def complement(aut: TraceAutomaton) -> TraceAutomaton:
    """Automaton for all traces over the alphabet that ``aut`` rejects."""
    return _explore(
        aut.alphabet,
        frozenset((aut.initial,)),
        aut.step,
        lambda s: s.isdisjoint(aut.accepting),
        "c",
    )


class Combine(str, Enum):
    UNION = "union"
    INTERSECTION = "intersection"
    DIFFERENCE = "difference"


_COMBINERS = {
    Combine.UNION: lambda x, y: x or y,
    Combine.INTERSECTION: lambda x, y: x and y,
    Combine.DIFFERENCE: lambda x, y: x and not y,
}


def combine(kind: Combine | str, a: TraceAutomaton, b: TraceAutomaton) -> TraceAutomaton:
    """Union, intersection or difference of two languages over one alphabet.

    Built as a product of the two on-the-fly subset constructions, so the
    result is a complete DFA whatever the inputs are.
    """
    kind = Combine(kind)
    require_same_alphabet(a, b)
    op = _COMBINERS[kind]
    return _explore(
        a.alphabet,
        (frozenset((a.initial,)), frozenset((b.initial,))),
        lambda node, s: (a.step(node[0], s), b.step(node[1], s)),
        lambda node: op(not node[0].isdisjoint(a.accepting), not node[1].isdisjoint(b.accepting)),
        "p",
    )


def union(a, b):
    return combine(Combine.UNION, a, b)


def intersection(a, b):
    return combine(Combine.INTERSECTION, a, b)


def difference(a, b):
    return combine(Combine.DIFFERENCE, a, b)


# --- decision procedures ---------------------------------------------------

def _shortest(alphabet: Alphabet, start, successor, accepting, live) -> Trace | None:
    """Shortlex-least accepted trace of an implicit automaton, or ``None``.

    Breadth-first search expanding symbols in declaration order reaches every
    node first along its shortlex-least path, so the first accepting node
    found carries the answer.
    """
    budget = _Budget()
    budget.charge()
    if accepting(start):
        return ()
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for a in alphabet:
            nxt = successor(node, a)
            if nxt in parent or not live(nxt):
                continue
            budget.charge()
            parent[nxt] = (node, a)
            if accepting(nxt):
                path = []
                cur = nxt
                while parent[cur] is not None:
                    cur, sym = parent[cur]
                    path.append(sym)
                return tuple(reversed(path))
            queue.append(nxt)
    return None


def is_empty(aut: TraceAutomaton) -> Verdict:
    """Decide whether ``aut`` accepts nothing; otherwise give its least trace."""
    found = _shortest_nfa(aut)
    if found is None:
        return Verdict(True)
    return Verdict(False, Witness(found, WitnessKind.SAMPLE))


def _shortest_nfa(aut: TraceAutomaton) -> Trace | None:
    # Search over subsets rather than single states: the BFS-order argument
    # needs a deterministic successor function.
    live = aut.coreachable
    return _shortest(
        aut.alphabet,
        frozenset((aut.initial,)) & live,
        lambda s, a: aut.step(s, a) & live,
        lambda s: not s.isdisjoint(aut.accepting),
        bool,
    )


def shortest_difference(b: TraceAutomaton, a: TraceAutomaton) -> Trace | None:
    """Shortlex-least trace in L(b) minus L(a)."""
    live = b.coreachable
    return _shortest(
        b.alphabet,
        (frozenset((b.initial,)) & live, frozenset((a.initial,))),
        lambda n, s: (b.step(n[0], s) & live, a.step(n[1], s)),
        lambda n: not n[0].isdisjoint(b.accepting) and n[1].isdisjoint(a.accepting),
        lambda n: bool(n[0]),
    )


def shortest_intersection(a: TraceAutomaton, b: TraceAutomaton) -> Trace | None:
    la, lb = a.coreachable, b.coreachable
    return _shortest(
        a.alphabet,
        (frozenset((a.initial,)) & la, frozenset((b.initial,)) & lb),
        lambda n, s: (a.step(n[0], s) & la, b.step(n[1], s) & lb),
        lambda n: not n[0].isdisjoint(a.accepting) and not n[1].isdisjoint(b.accepting),
        lambda n: bool(n[0]) and bool(n[1]),
    )


def includes(a: TraceAutomaton, b: TraceAutomaton) -> Verdict:
    """Decide L(b) ⊆ L(a); on failure the witness is the least trace of L(b) \\ L(a)."""
    require_same_alphabet(a, b)
    found = shortest_difference(b, a)
    if found is None:
        return Verdict(True)
    return Verdict(False, Witness(found, WitnessKind.DIFFERENCE))


def disjoint(a: TraceAutomaton, b: TraceAutomaton) -> Verdict:
    """Decide L(a) ∩ L(b) = ∅; on failure the witness is the least shared trace."""
    require_same_alphabet(a, b)
    found = shortest_intersection(a, b)
    if found is None:
        return Verdict(True)
    return Verdict(False, Witness(found, WitnessKind.SAMPLE))


def equivalent(a: TraceAutomaton, b: TraceAutomaton) -> bool:
    return includes(a, b).holds and includes(b, a).holds


# --- enumeration and construction -----------------------------------------

def enumerate_traces(aut: TraceAutomaton, max_len: int) -> list[Trace]:
    """All accepted traces of length at most ``max_len``, in shortlex order."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    live = aut.coreachable
    level = [((), frozenset((aut.initial,)) & live)]
    out = []
    for length in range(max_len + 1):
        nxt = []
        for trace, current in level:
            if not current:
                continue
            if not current.isdisjoint(aut.accepting):
                out.append(trace)
            if length < max_len:
                for a in aut.alphabet:
                    succ = aut.step(current, a) & live
                    if succ:
                        nxt.append((trace + (a,), succ))
        level = nxt
    return out


def from_traces(traces: Iterable[Iterable[str]], alphabet: Alphabet) -> TraceAutomaton:
    """Prefix-tree acceptor: a DFA accepting exactly the given finite trace set."""
    items = sorted({alphabet.check_trace(t) for t in traces}, key=alphabet.sort_key)
    nodes: dict[Trace, str] = {(): "q0"}
    transitions = []
    for trace in items:
        for i in range(1, len(trace) + 1):
            prefix = trace[:i]
            if prefix not in nodes:
                nodes[prefix] = f"q{len(nodes)}"
                transitions.append((nodes[prefix[:-1]], prefix[-1], nodes[prefix]))
    # Re-number breadth-first so names follow shortlex order of prefixes.
    ordered = sorted(nodes, key=alphabet.sort_key)
    rename = {nodes[p]: f"q{i}" for i, p in enumerate(ordered)}
    return TraceAutomaton.build(
        alphabet,
        [rename[nodes[p]] for p in ordered],
        "q0",
        [rename[nodes[t]] for t in items],
        [(rename[s], a, rename[d]) for s, a, d in transitions],
    )


def empty_language(alphabet: Alphabet) -> TraceAutomaton:
    return TraceAutomaton.build(alphabet, ["q0"], "q0", [], [])


def universal_language(alphabet: Alphabet) -> TraceAutomaton:
    return TraceAutomaton.build(alphabet, ["q0"], "q0", ["q0"], [("q0", a, "q0") for a in alphabet])


def minimize(aut: TraceAutomaton) -> TraceAutomaton:
    """Minimal trimmed DFA with states ``q0..qn`` in breadth-first order.

    The dead sink is dropped, so the empty language becomes a single
    non-accepting state with no transitions.
    """
    dfa = determinize(aut)
    alphabet = dfa.alphabet
    succ = {(src, a): dst for src, a, dst in dfa.transitions}
    # Moore partition refinement on the complete DFA.
    block = {q: int(q in dfa.accepting) for q in dfa.states}
    while True:
        signature = {
            q: (block[q],) + tuple(block[succ[q, a]] for a in alphabet) for q in dfa.states
        }
        ids: dict[tuple, int] = {}
        refined = {q: ids.setdefault(signature[q], len(ids)) for q in dfa.states}
        if len(ids) == len(set(block.values())):
            block = refined
            break
        block = refined
    accepting_blocks = {block[q] for q in dfa.accepting}
    quotient = {(block[q], a): block[succ[q, a]] for q in dfa.states for a in alphabet}
    # A non-accepting block that maps to itself on every symbol is the sink.
    dead = {
        b for b in set(block.values())
        if b not in accepting_blocks and all(quotient[b, a] == b for a in alphabet)
    }
    start = block[dfa.initial]
    names = {start: "q0"}
    queue = deque([start])
    transitions = []
    while queue:
        b = queue.popleft()
        for a in alphabet:
            nb = quotient[b, a]
            if nb in dead:
                continue
            if nb not in names:
                names[nb] = f"q{len(names)}"
                queue.append(nb)
            transitions.append((names[b], a, names[nb]))
    return TraceAutomaton.build(
        alphabet,
        names.values(),
        "q0",
        [names[b] for b in names if b in accepting_blocks],
        transitions,
    )
