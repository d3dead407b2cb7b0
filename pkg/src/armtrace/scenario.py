"""Synthetic model chains and observation logs with known defect origins.

Random numbers come from MT19937 (Matsumoto & Nishimura, ``mt19937ar``).
The generator is seeded with ``init_by_array`` whose key is the seed split
into 32-bit words, least significant first (a zero seed is the key
``[0]``).  Only raw ``genrand_int32`` outputs are consumed; everything else
is derived from them by :meth:`Mt19937.below`, so any implementation of the
reference generator reproduces the same scenarios.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from .emergence import OriginPhase, TraceLog, format_log
from .lang import (
    Alphabet,
    Trace,
    TraceAutomaton,
    complement,
    determinize,
    difference,
    format_trace,
    intersection,
    is_empty,
    serialize,
)
from .relations import ModelChain

log = logging.getLogger(__name__)

RNG_ID = "mt19937ar/init_by_array(seed as 32-bit words, little-endian)/genrand_int32"

SYMBOLS = ("a", "b", "c", "d", "e")

INJECTABLE = (
    OriginPhase.REQUIREMENTS_GAP,
    OriginPhase.DESIGN_GAP,
    OriginPhase.IMPLEMENTATION_GAP,
)

# Percent chances used by the random automaton construction.
TRANSITION_PCT = 45
EXTRA_TARGET_PCT = 15
ACCEPTING_PCT = 40
DELETE_PCT = 15


class Mt19937:
    """Portable random stream on top of the reference MT19937 generator."""

    def __init__(self, seed: int):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        # CPython's random.seed(int) is init_by_array over the 32-bit words of
        # abs(seed), and getrandbits(32) is one genrand_int32 call.
        self._mt = random.Random(seed)

    def next_u32(self) -> int:
        return self._mt.getrandbits(32)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by masked rejection sampling.

        Draws ``ceil(b / 32)`` words (``b`` = bit length of ``n - 1``),
        combines them least significant word first, keeps the low ``b`` bits
        and retries while the result is ``>= n``.  ``n == 1`` draws nothing.
        """
        if n < 1:
            raise ValueError("n must be positive")
        if n == 1:
            return 0
        bits = (n - 1).bit_length()
        words = (bits + 31) // 32
        mask = (1 << bits) - 1
        while True:
            value = 0
            for i in range(words):
                value |= self.next_u32() << (32 * i)
            value &= mask
            if value < n:
                return value

    def chance(self, pct: int) -> bool:
        return self.below(100) < pct

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    alphabet_size: int = 2
    states_per_model: int = 4
    extra_traces_per_phase: dict[OriginPhase, int] = field(default_factory=dict)
    log_size: int = 10
    max_trace_len: int = 6

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 2 <= self.alphabet_size <= len(SYMBOLS):
            raise ValueError(f"alphabet_size must be between 2 and {len(SYMBOLS)}")
        if not 2 <= self.states_per_model <= 8:
            raise ValueError("states_per_model must be between 2 and 8")
        if self.log_size < 0 or self.max_trace_len < 0:
            raise ValueError("counts must be non-negative")
        for phase, count in self.extra_traces_per_phase.items():
            if OriginPhase(phase) not in INJECTABLE:
                raise ValueError(f"cannot inject traces with origin {phase}")
            if count < 0:
                raise ValueError("counts must be non-negative")

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(SYMBOLS[: self.alphabet_size])

    def extra(self, phase: OriginPhase) -> int:
        return self.extra_traces_per_phase.get(phase, 0)


@dataclass(frozen=True)
class Scenario:
    chain: ModelChain
    injected: dict[Trace, OriginPhase]
    log: TraceLog
    notes: tuple[str, ...] = ()


def _trim(alphabet, states, initial, accepting, transitions) -> TraceAutomaton:
    """Drop states that are unreachable or cannot reach acceptance (keeps initial)."""
    fwd: dict[str, set[str]] = {}
    back: dict[str, set[str]] = {}
    for s, _, d in transitions:
        fwd.setdefault(s, set()).add(d)
        back.setdefault(d, set()).add(s)

    def closure(start, edges):
        seen = set(start)
        stack = list(start)
        while stack:
            q = stack.pop()
            for r in edges.get(q, ()):
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return seen

    useful = closure([initial], fwd) & closure(accepting, back)
    useful.add(initial)
    kept = [q for q in states if q in useful]
    return TraceAutomaton.build(
        alphabet,
        kept,
        initial,
        [q for q in accepting if q in useful],
        [(s, a, d) for s, a, d in transitions if s in useful and d in useful],
    )


def _random_automaton(cfg: ScenarioConfig, rng: Mt19937) -> TraceAutomaton:
    n = cfg.states_per_model
    states = [f"q{i}" for i in range(n)]
    transitions = []
    # Spanning tree from q0 keeps every state reachable.
    for i in range(1, n):
        transitions.append((states[rng.below(i)], cfg.alphabet.symbols[rng.below(cfg.alphabet_size)], states[i]))
    for p in states:
        for a in cfg.alphabet:
            if rng.chance(TRANSITION_PCT):
                transitions.append((p, a, states[rng.below(n)]))
                if rng.chance(EXTRA_TARGET_PCT):
                    transitions.append((p, a, states[rng.below(n)]))
    accepting = [q for q in states if rng.chance(ACCEPTING_PCT)]
    if not accepting:
        accepting = [states[rng.below(n)]]
    return _trim(cfg.alphabet, states, "q0", accepting, sorted(set(transitions), key=_order_key(states, cfg.alphabet)))


def _order_key(states, alphabet):
    idx = {q: i for i, q in enumerate(states)}
    sym = alphabet.index
    return lambda t: (idx[t[0]], sym[t[1]], idx[t[2]])


def _sub_automaton(aut: TraceAutomaton, rng: Mt19937) -> TraceAutomaton:
    """Delete a random non-empty subset of transitions and accepting flags.

    Removing either can only shrink the accepted language, so the result
    refines ``aut`` without any inclusion check.
    """
    key = _order_key(aut.states, aut.alphabet)
    transitions = sorted(aut.transitions, key=key)
    accepting = [q for q in aut.states if q in aut.accepting]
    items = [("t", t) for t in transitions] + [("f", q) for q in accepting]
    if not items:
        return aut
    doomed = {i for i in range(len(items)) if rng.chance(DELETE_PCT)}
    if not doomed:
        doomed = {rng.below(len(items))}
    # Keep one accepting flag so the refined model rarely collapses to nothing.
    flags = list(range(len(transitions), len(items)))
    if flags and all(i in doomed for i in flags):
        doomed.discard(flags[rng.below(len(flags))])
        if not doomed and transitions:
            doomed = {rng.below(len(transitions))}
    kept = [item for i, item in enumerate(items) if i not in doomed]
    return _trim(
        aut.alphabet,
        aut.states,
        aut.initial,
        [q for kind, q in kept if kind == "f"],
        [t for kind, t in kept if kind == "t"],
    )


def gen_chain(cfg: ScenarioConfig, rng: Mt19937 | None = None) -> ModelChain:
    """Random requirements model, refined twice by random deletion."""
    rng = rng or Mt19937(cfg.seed)
    rm = _random_automaton(cfg, rng)
    dm = _sub_automaton(rm, rng)
    im = _sub_automaton(dm, rng)
    return ModelChain(rm, dm, im)


class _WordSampler:
    """Uniform sampling of accepted traces of bounded length.

    Works on a DFA, where accepted traces and accepting paths coincide.
    ``count[k][q]`` is the number of accepted traces of length at most ``k``
    read from state ``q``.
    """

    def __init__(self, aut: TraceAutomaton, max_len: int):
        self.dfa = determinize(aut)
        self.max_len = max_len
        self.succ = {(s, a): d for s, a, d in self.dfa.transitions}
        alphabet = self.dfa.alphabet
        count = [{q: int(q in self.dfa.accepting) for q in self.dfa.states}]
        for _ in range(max_len):
            prev = count[-1]
            count.append({
                q: int(q in self.dfa.accepting) + sum(prev[self.succ[q, a]] for a in alphabet)
                for q in self.dfa.states
            })
        self.count = count

    @property
    def total(self) -> int:
        return self.count[self.max_len][self.dfa.initial]

    def unrank(self, r: int) -> Trace:
        q = self.dfa.initial
        out = []
        for k in range(self.max_len, -1, -1):
            if q in self.dfa.accepting:
                if r == 0:
                    return tuple(out)
                r -= 1
            for a in self.dfa.alphabet:
                nxt = self.succ[q, a]
                c = self.count[k - 1][nxt] if k > 0 else 0
                if r < c:
                    out.append(a)
                    q = nxt
                    break
                r -= c
            else:
                break
        raise IndexError("rank out of range")

    def sample_distinct(self, n: int, rng: Mt19937, exclude=frozenset()) -> list[Trace]:
        """Up to ``n`` distinct traces not in ``exclude``, fewer only if supply runs out."""
        total = self.total
        if total <= 4 * (n + len(exclude)):
            return self._sample_from_all(n, rng, exclude)
        picked: list[Trace] = []
        seen_ranks: set[int] = set()
        while len(picked) < n:
            r = rng.below(total)
            if r in seen_ranks:
                continue
            seen_ranks.add(r)
            trace = self.unrank(r)
            if trace not in exclude:
                picked.append(trace)
        return picked

    def _sample_from_all(self, n, rng, exclude):
        pool = [t for t in (self.unrank(r) for r in range(self.total)) if t not in exclude]
        if len(pool) <= n:
            return pool
        picked = []
        for _ in range(n):
            picked.append(pool.pop(rng.below(len(pool))))
        return picked


def sample_log(
    im: TraceAutomaton,
    n: int,
    max_len: int,
    rng: Mt19937,
    notes: list[str] | None = None,
) -> TraceLog:
    """Draw ``n`` distinct traces accepted by ``im``, each at most ``max_len`` long.

    Every accepted trace within the length bound is equally likely.  When
    fewer than ``n`` exist, all of them are returned and a note is recorded.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return TraceLog((), "sample")
    sampler = _WordSampler(im, max_len)
    if sampler.total == 0:
        _note(notes, f"implementation model accepts no trace of length <= {max_len}; log is empty")
        return TraceLog((), "sample")
    traces = sampler.sample_distinct(n, rng)
    if len(traces) < n:
        _note(notes, f"only {len(traces)} accepted traces of length <= {max_len}; requested {n}")
    return TraceLog(tuple(traces), "sample")


def _note(notes, message):
    log.warning(message)
    if notes is not None:
        notes.append(message)


def _gap_language(chain: ModelChain, phase: OriginPhase) -> TraceAutomaton:
    if phase is OriginPhase.REQUIREMENTS_GAP:
        return complement(chain.rm)
    if phase is OriginPhase.DESIGN_GAP:
        return difference(chain.rm, chain.dm)
    if phase is OriginPhase.IMPLEMENTATION_GAP:
        return difference(intersection(chain.rm, chain.dm), chain.im)
    raise ValueError(f"cannot inject traces with origin {phase}")


def inject(
    scenario: Scenario,
    phase: OriginPhase,
    count: int,
    rng: Mt19937,
    max_len: int = 6,
) -> Scenario:
    """Add ``count`` fresh observed traces whose origin is exactly ``phase``.

    Infeasible requests (the gap language is empty) and short supply are
    recorded in ``notes`` rather than raised.
    """
    phase = OriginPhase(phase)
    if count == 0:
        return scenario
    gap = _gap_language(scenario.chain, phase)
    notes = list(scenario.notes)
    emptiness = is_empty(gap)
    if emptiness.holds:
        _note(notes, f"{phase.value}: infeasible, no trace has this origin")
        return replace(scenario, notes=tuple(notes))
    exclude = frozenset(scenario.log.traces)
    traces = _WordSampler(gap, max_len).sample_distinct(count, rng, exclude)
    if not traces and emptiness.witness.trace not in exclude:
        traces = [emptiness.witness.trace]
    if len(traces) < count:
        _note(notes, f"{phase.value}: only {len(traces)} of {count} traces could be injected")
    injected = dict(scenario.injected)
    injected.update((t, phase) for t in traces)
    return Scenario(
        chain=scenario.chain,
        injected=injected,
        log=TraceLog(scenario.log.traces + tuple(traces), scenario.log.source),
        notes=tuple(notes),
    )


def generate(cfg: ScenarioConfig) -> Scenario:
    """Chain, conforming log sample, injected defects and a final shuffle."""
    rng = Mt19937(cfg.seed)
    chain = gen_chain(cfg, rng)
    notes: list[str] = []
    base = sample_log(chain.im, cfg.log_size, cfg.max_trace_len, rng, notes)
    scenario = Scenario(chain, {}, TraceLog(base.traces, f"scenario seed {cfg.seed}"), tuple(notes))
    for phase in INJECTABLE:
        scenario = inject(scenario, phase, cfg.extra(phase), rng, cfg.max_trace_len)
    traces = list(scenario.log.traces)
    rng.shuffle(traces)
    return replace(scenario, log=TraceLog(tuple(traces), scenario.log.source))


def meta_text(cfg: ScenarioConfig, scenario: Scenario) -> str:
    lines = [
        f"rng: {RNG_ID}",
        f"seed: {cfg.seed}",
        f"alphabet_size: {cfg.alphabet_size}",
        f"states_per_model: {cfg.states_per_model}",
        f"log_size: {cfg.log_size}",
        f"max_trace_len: {cfg.max_trace_len}",
    ]
    for phase in INJECTABLE:
        lines.append(f"extra_{phase.value}: {cfg.extra(phase)}")
    lines.extend(f"note: {n}" for n in scenario.notes)
    return "\n".join(lines) + "\n"


def truth_text(scenario: Scenario) -> str:
    lines = ["# trace\torigin"]
    lines.extend(f"{format_trace(t)}\t{o.value}" for t, o in scenario.injected.items())
    return "\n".join(lines) + "\n"


def write_bundle(cfg: ScenarioConfig, scenario: Scenario, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, aut in scenario.chain.phases():
        (out / f"{name}.aut").write_text(serialize(aut), encoding="utf-8")
    header = f"# generator: {RNG_ID} seed {cfg.seed}\n"
    (out / "log.txt").write_text(header + format_log(scenario.log, scenario.chain.alphabet), encoding="utf-8")
    (out / "truth.tsv").write_text(truth_text(scenario), encoding="utf-8")
    (out / "meta.txt").write_text(meta_text(cfg, scenario), encoding="utf-8")
    return out
