from hypothesis import strategies as st

from armtrace.lang import Alphabet, TraceAutomaton, from_traces, parse_automaton

AB = Alphabet.of("a", "b")
ABC = Alphabet.of("a", "b", "c")


def words(*items: str, alphabet: Alphabet = AB):
    """Finite language from single-character words; '' is the empty trace."""
    return from_traces([tuple(w) for w in items], alphabet)


def T(text: str):
    return tuple(text)


def aut(text: str):
    return parse_automaton(text)


@st.composite
def automata(draw, alphabet=AB, max_states=4):
    n = draw(st.integers(1, max_states))
    states = [f"s{i}" for i in range(n)]
    triples = [(p, a, q) for p in states for a in alphabet for q in states]
    transitions = draw(st.sets(st.sampled_from(triples), max_size=2 * n * len(alphabet)))
    accepting = draw(st.sets(st.sampled_from(states)))
    initial = draw(st.sampled_from(states))
    return TraceAutomaton.build(alphabet, states, initial, accepting, transitions)
