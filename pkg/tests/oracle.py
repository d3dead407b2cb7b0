"""Brute-force reference semantics used by the test suite.

Nothing here calls into the subset construction, product construction or
BFS search of ``armtrace.lang``; automata are simulated directly from their
transition sets.
"""

from __future__ import annotations

import itertools
import random

from armtrace.lang import Alphabet, TraceAutomaton


class Sim:
    """Direct NFA simulation over state sets."""

    def __init__(self, aut: TraceAutomaton):
        self.table: dict[tuple[str, str], set[str]] = {}
        for src, sym, dst in aut.transitions:
            self.table.setdefault((src, sym), set()).add(dst)
        self.initial = frozenset([aut.initial])
        self.final = set(aut.accepting)

    def step(self, current, symbol):
        out = set()
        for q in current:
            out |= self.table.get((q, symbol), set())
        return frozenset(out)

    def accepting(self, current) -> bool:
        return bool(self.final & current)

    def accepts(self, trace) -> bool:
        current = self.initial
        for e in trace:
            current = self.step(current, e)
        return self.accepting(current)


def all_traces(symbols, max_len):
    """Every trace over ``symbols`` up to ``max_len``, in shortlex order."""
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


def language(aut: TraceAutomaton, max_len: int) -> list[tuple[str, ...]]:
    sim = Sim(aut)
    return [t for t in all_traces(aut.alphabet.symbols, max_len) if sim.accepts(t)]


def subset_count(aut: TraceAutomaton) -> int:
    """Number of reachable state sets, including the empty one (complete DFA size)."""
    sim = Sim(aut)
    seen = {sim.initial}
    stack = [sim.initial]
    while stack:
        cur = stack.pop()
        for a in aut.alphabet:
            nxt = sim.step(cur, a)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen)


def length_bound(*automata: TraceAutomaton) -> int:
    n = 1
    for a in automata:
        n *= subset_count(a)
    return n


def walk(automata, max_len=None):
    """Enumerate the trace tree of the joint simulation, breadth first.

    A subtree is skipped when its tuple of state sets was already reached by a
    shorter (or shortlex-smaller) trace; such subtrees accept exactly the same
    continuations, so every reachable acceptance pattern is still reported,
    each with the shortlex-least trace producing it.  Yields
    ``(trace, acceptance tuple)``.
    """
    sims = [Sim(a) for a in automata]
    symbols = automata[0].alphabet.symbols
    if max_len is None:
        max_len = length_bound(*automata)
    start = tuple(s.initial for s in sims)
    seen = {start}
    level = [((), start)]
    depth = 0
    while level and depth <= max_len:
        nxt = []
        for trace, node in level:
            yield trace, tuple(s.accepting(n) for s, n in zip(sims, node))
            if depth == max_len:
                continue
            for a in symbols:
                child = tuple(s.step(n, a) for s, n in zip(sims, node))
                if child not in seen:
                    seen.add(child)
                    nxt.append((trace + (a,), child))
        level = nxt
        depth += 1


def first(automata, predicate):
    """Shortlex-least trace whose acceptance tuple satisfies ``predicate``."""
    for trace, acc in walk(automata):
        if predicate(*acc):
            return trace
    return None


def subset_of(b, a) -> bool:
    """L(b) within L(a), by the exhaustive walk."""
    return first([b, a], lambda xb, xa: xb and not xa) is None


def same_language(a, b) -> bool:
    return first([a, b], lambda x, y: x != y) is None


def random_automaton(rng: random.Random, alphabet: Alphabet, max_states: int = 5) -> TraceAutomaton:
    n = rng.randint(1, max_states)
    density = rng.choice((0.1, 0.2, 0.3, 0.45))
    states = [f"s{i}" for i in range(n)]
    transitions = [
        (p, a, q) for p in states for a in alphabet for q in states if rng.random() < density
    ]
    accepting = [q for q in states if rng.random() < 0.4]
    return TraceAutomaton.build(alphabet, states, rng.choice(states), accepting, transitions)


def random_pair(rng: random.Random):
    alphabet = Alphabet(tuple("abc"[: rng.randint(1, 3)]))
    return random_automaton(rng, alphabet), random_automaton(rng, alphabet)
