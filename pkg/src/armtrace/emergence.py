"""Emergent-behavior extraction from observed trace logs.

An observed trace is emergent when the implementation model does not
accept it.  Each emergent trace is attributed to the earliest phase whose
model already fails to specify it, and the emergent set as a whole is
matched against the three inconsistency patterns between the emergent
behavior and the requirements, design and implementation models.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .errors import ForeignSymbolError, LogFormatError
from .lang import (
    Alphabet,
    Trace,
    TraceAutomaton,
    accepts,
    combine,
    disjoint,
    from_traces,
    includes,
    is_empty,
    require_same_alphabet,
)
from .relations import ModelChain

CASE3_CAVEAT = (
    "Case3 treats the implementation model as an ordinary automaton; when the "
    "deployed system includes hardware or environment set-up, the mismatch may "
    "lie outside the modelled code."
)


@dataclass(frozen=True)
class TraceLog:
    traces: tuple[Trace, ...]
    source: str = ""

    def distinct(self) -> tuple[Trace, ...]:
        """Traces with duplicates removed, in order of first occurrence."""
        return tuple(dict.fromkeys(self.traces))

    def frequencies(self) -> Counter:
        return Counter(self.traces)

    def __len__(self) -> int:
        return len(self.traces)


def parse_log(text: str, alphabet: Alphabet | None = None, source: str = "") -> TraceLog:
    """Read a trace log: one trace per line, events separated by whitespace.

    A line holding only ``-`` is the empty trace.  An optional first line
    ``alphabet: a, b`` declares the alphabet; when ``alphabet`` is also given
    the two must agree.  Every event is checked against the alphabet in use.
    """
    traces = []
    declared = None
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_content and line.startswith("alphabet:"):
            seen_content = True
            symbols = [s.strip() for s in line[len("alphabet:"):].split(",")]
            if any(not s for s in symbols):
                raise LogFormatError("malformed alphabet header", lineno)
            declared = Alphabet(tuple(symbols))
            if alphabet is not None and not alphabet.same_symbols(declared):
                raise LogFormatError("alphabet header disagrees with the models", lineno)
            continue
        seen_content = True
        if line == "-":
            traces.append(((), lineno))
            continue
        if "," in line:
            raise LogFormatError("events are separated by whitespace, not commas", lineno)
        events = tuple(line.split())
        if "-" in events:
            raise LogFormatError("'-' (empty trace) must stand alone on its line", lineno)
        traces.append((events, lineno))
    check = alphabet or declared
    if check is not None:
        for events, lineno in traces:
            for e in events:
                if e not in check:
                    raise ForeignSymbolError(e, lineno)
    result = [events for events, _ in traces]
    return TraceLog(tuple(result), source)


def format_log(log: TraceLog, alphabet: Alphabet | None = None) -> str:
    lines = []
    if alphabet is not None:
        lines.append("alphabet: " + ", ".join(alphabet))
    lines.extend(" ".join(t) if t else "-" for t in log.traces)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MembershipVector:
    in_rbt: bool
    in_dbt: bool
    in_ibt: bool


class OriginPhase(str, Enum):
    REQUIREMENTS_GAP = "RequirementsGap"
    DESIGN_GAP = "DesignGap"
    IMPLEMENTATION_GAP = "ImplementationGap"
    NOT_EMERGENT = "NotEmergent"


class Case(str, Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    NO_EMERGENCE = "NoEmergence"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class CaseClassification:
    case: Case
    # case name -> conjunct name -> value, e.g. conjuncts["Case2"]["ebt_in_prior"]
    conjuncts: dict[str, dict[str, bool]] = field(default_factory=dict)

    @property
    def satisfied(self) -> list[str]:
        return [name for name, parts in self.conjuncts.items() if all(parts.values())]


@dataclass(frozen=True)
class TraceFinding:
    membership: MembershipVector
    origin: OriginPhase
    count: int


@dataclass(frozen=True)
class EmergentReport:
    observed_count: int
    emergent_traces: tuple[Trace, ...]
    per_trace: dict[Trace, TraceFinding]
    case: CaseClassification

    @property
    def guarantee_violated(self) -> bool:
        return bool(self.emergent_traces)

    @property
    def distinct_count(self) -> int:
        return len(self.per_trace)


def membership_vector(trace: Trace, chain: ModelChain) -> MembershipVector:
    return MembershipVector(
        in_rbt=accepts(chain.rm, trace),
        in_dbt=accepts(chain.dm, trace),
        in_ibt=accepts(chain.im, trace),
    )


def origin_of(vector: MembershipVector) -> OriginPhase:
    if vector.in_ibt:
        return OriginPhase.NOT_EMERGENT
    if not vector.in_rbt:
        return OriginPhase.REQUIREMENTS_GAP
    if not vector.in_dbt:
        return OriginPhase.DESIGN_GAP
    return OriginPhase.IMPLEMENTATION_GAP


def per_trace_origin(trace: Trace, chain: ModelChain) -> OriginPhase:
    """Earliest phase whose model does not specify ``trace``.

    ImplementationGap means the trace was required and designed but the
    implementation model rejects it, yet it was observed at run time.
    """
    return origin_of(membership_vector(trace, chain))


def _case_conjuncts(ebt: TraceAutomaton, model: TraceAutomaton) -> dict[str, bool]:
    return {
        "overlaps": not disjoint(model, ebt).holds,
        "model_not_in_ebt": not includes(ebt, model).holds,
        "ebt_not_in_model": not includes(model, ebt).holds,
    }


def localize_case(ebt: TraceAutomaton, chain: ModelChain) -> CaseClassification:
    """Match the emergent language against the three phase-inconsistency cases.

    Case 1 is a strict evolution between requirements and emergent behavior.
    Case 2 additionally needs the emergent behavior inside the requirements
    and a strict evolution against the design; Case 3 the same one phase
    later.  The first satisfied case wins; all conjuncts are reported.
    """
    require_same_alphabet(chain.rm, ebt)
    conjuncts = {
        "Case1": _case_conjuncts(ebt, chain.rm),
        "Case2": {"ebt_in_prior": includes(chain.rm, ebt).holds, **_case_conjuncts(ebt, chain.dm)},
        "Case3": {"ebt_in_prior": includes(chain.dm, ebt).holds, **_case_conjuncts(ebt, chain.im)},
    }
    if is_empty(ebt).holds:
        return CaseClassification(Case.NO_EMERGENCE, conjuncts)
    for name, parts in conjuncts.items():
        if all(parts.values()):
            return CaseClassification(Case(name), conjuncts)
    return CaseClassification(Case.UNCLASSIFIED, conjuncts)


def extract_emergent(log: TraceLog, chain: ModelChain) -> EmergentReport:
    counts = log.frequencies()
    per_trace = {}
    for trace in log.distinct():
        chain.alphabet.check_trace(trace)
        vector = membership_vector(trace, chain)
        per_trace[trace] = TraceFinding(vector, origin_of(vector), counts[trace])
    emergent = tuple(t for t, f in per_trace.items() if not f.membership.in_ibt)
    case = localize_case(from_traces(emergent, chain.alphabet), chain)
    return EmergentReport(
        observed_count=len(log),
        emergent_traces=emergent,
        per_trace=per_trace,
        case=case,
    )


@dataclass(frozen=True)
class ExtendedDecomposition:
    concrete_d: TraceAutomaton
    extra_d: TraceAutomaton
    concrete_i: TraceAutomaton
    extra_i: TraceAutomaton
    uobt_r_observed: tuple[Trace, ...]
    uobt_d_observed: tuple[Trace, ...]


def decompose_extended(chain: ModelChain, report: EmergentReport) -> ExtendedDecomposition:
    """Split design and implementation into the part refined from the previous
    phase and the extra part it adds on its own.

    Observed unspecified traces are attributed to the requirements or design
    level; the implementation is taken to be pure code, so nothing is
    attributed to it.
    """
    by_origin = {
        phase: tuple(t for t in report.emergent_traces if report.per_trace[t].origin is phase)
        for phase in (OriginPhase.REQUIREMENTS_GAP, OriginPhase.DESIGN_GAP)
    }
    return ExtendedDecomposition(
        concrete_d=combine("intersection", chain.dm, chain.rm),
        extra_d=combine("difference", chain.dm, chain.rm),
        concrete_i=combine("intersection", chain.im, chain.dm),
        extra_i=combine("difference", chain.im, chain.dm),
        uobt_r_observed=by_origin[OriginPhase.REQUIREMENTS_GAP],
        uobt_d_observed=by_origin[OriginPhase.DESIGN_GAP],
    )
