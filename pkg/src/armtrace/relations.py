"""Evolution-step classification and waterfall refinement-chain checking."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import AlphabetMismatchError
from .lang import (
    TraceAutomaton,
    Verdict,
    Witness,
    WitnessKind,
    includes,
    require_same_alphabet,
    shortest_difference,
    shortest_intersection,
)


class EvolutionClass(str, Enum):
    EQUIVALENT = "Equivalent"
    REFINEMENT = "Refinement"
    ABSTRACTION = "Abstraction"
    TOTAL_CHANGE = "TotalChange"
    STRICT_EVOLUTION = "StrictEvolution"


@dataclass(frozen=True)
class EvolutionReport:
    abstraction_holds: bool
    refinement_holds: bool
    total_change_holds: bool
    strict_evolution_holds: bool
    canonical: EvolutionClass
    prev_only: Witness | None = None
    next_only: Witness | None = None
    shared: Witness | None = None

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "abstraction": self.abstraction_holds,
            "refinement": self.refinement_holds,
            "total_change": self.total_change_holds,
            "strict_evolution": self.strict_evolution_holds,
        }


def _canonical(abstraction: bool, refinement: bool, total_change: bool) -> EvolutionClass:
    if abstraction and refinement:
        return EvolutionClass.EQUIVALENT
    if refinement:
        return EvolutionClass.REFINEMENT
    if abstraction:
        return EvolutionClass.ABSTRACTION
    if total_change:
        return EvolutionClass.TOTAL_CHANGE
    return EvolutionClass.STRICT_EVOLUTION


def classify_evolution(prev: TraceAutomaton, next: TraceAutomaton) -> EvolutionReport:
    """Evaluate every evolution relation between two consecutive models.

    Each flag is its set condition taken literally over accepted languages,
    so overlapping flags are possible: identical languages are both an
    abstraction and a refinement, and an empty language makes the step a
    total change as well.
    """
    require_same_alphabet(prev, next)
    prev_only = shortest_difference(prev, next)
    next_only = shortest_difference(next, prev)
    shared = shortest_intersection(prev, next)

    abstraction = prev_only is None
    refinement = next_only is None
    total_change = shared is None
    strict = shared is not None and prev_only is not None and next_only is not None

    def wit(trace, kind):
        return None if trace is None else Witness(trace, kind)

    return EvolutionReport(
        abstraction_holds=abstraction,
        refinement_holds=refinement,
        total_change_holds=total_change,
        strict_evolution_holds=strict,
        canonical=_canonical(abstraction, refinement, total_change),
        prev_only=wit(prev_only, WitnessKind.DIFFERENCE),
        next_only=wit(next_only, WitnessKind.DIFFERENCE),
        shared=wit(shared, WitnessKind.SAMPLE),
    )


@dataclass(frozen=True)
class ModelChain:
    """Requirements, design and implementation models of one system."""

    rm: TraceAutomaton
    dm: TraceAutomaton
    im: TraceAutomaton

    def __post_init__(self):
        for other in (self.dm, self.im):
            if not self.rm.alphabet.same_symbols(other.alphabet):
                raise AlphabetMismatchError(self.rm.alphabet.symbols, other.alphabet.symbols)

    @property
    def alphabet(self):
        return self.rm.alphabet

    def phases(self):
        return (("rm", self.rm), ("dm", self.dm), ("im", self.im))


@dataclass(frozen=True)
class ChainReport:
    dm_refines_rm: Verdict
    im_refines_dm: Verdict

    @property
    def chain_holds(self) -> bool:
        return self.dm_refines_rm.holds and self.im_refines_dm.holds


def check_chain(chain: ModelChain) -> ChainReport:
    """Check that design refines requirements and implementation refines design.

    When both steps hold, every implemented trace is a designed trace and every
    designed trace a required one, which is the precondition for the
    no-unspecified-behavior guarantee.
    """
    return ChainReport(
        dm_refines_rm=includes(chain.rm, chain.dm),
        im_refines_dm=includes(chain.dm, chain.im),
    )
