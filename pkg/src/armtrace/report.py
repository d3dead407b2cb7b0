"""Report documents: plain dicts that serialize to stable JSON or to text."""

from __future__ import annotations

import json

from .emergence import CASE3_CAVEAT, Case, EmergentReport, ExtendedDecomposition
from .lang import TraceAutomaton, Verdict, Witness, format_trace, minimize, serialize
from .relations import ChainReport, EvolutionReport

SCHEMA_VERSION = 1


class ReportSchemaError(ValueError):
    pass


def _witness(w: Witness | None):
    return None if w is None else {"trace": list(w.trace), "kind": w.kind.value}


def _verdict(v: Verdict) -> dict:
    return {"holds": v.holds, "witness": _witness(v.witness)}


def _automaton(aut: TraceAutomaton) -> dict:
    minimal = minimize(aut)
    return {"canonical": serialize(minimal), "states": len(minimal.states)}


def evolution_doc(r: EvolutionReport) -> dict:
    return {
        "flags": r.flags,
        "canonical": r.canonical.value,
        "evidence": {
            "prev_only": _witness(r.prev_only),
            "next_only": _witness(r.next_only),
            "shared": _witness(r.shared),
        },
    }


def chain_doc(r: ChainReport) -> dict:
    return {
        "dm_refines_rm": _verdict(r.dm_refines_rm),
        "im_refines_dm": _verdict(r.im_refines_dm),
        "chain_holds": r.chain_holds,
    }


def emergent_doc(r: EmergentReport) -> dict:
    case = {
        "case": r.case.case.value,
        "satisfied": r.case.satisfied,
        "conjuncts": r.case.conjuncts,
    }
    if r.case.case is Case.CASE3:
        case["caveat"] = CASE3_CAVEAT
    return {
        "observed_count": r.observed_count,
        "distinct_count": r.distinct_count,
        "guarantee_violated": r.guarantee_violated,
        "emergent_traces": [list(t) for t in r.emergent_traces],
        "traces": [
            {
                "trace": list(t),
                "count": f.count,
                "in_rbt": f.membership.in_rbt,
                "in_dbt": f.membership.in_dbt,
                "in_ibt": f.membership.in_ibt,
                "origin": f.origin.value,
            }
            for t, f in r.per_trace.items()
        ],
        "case": case,
    }


def decomposition_doc(d: ExtendedDecomposition) -> dict:
    return {
        "concrete_d": _automaton(d.concrete_d),
        "extra_d": _automaton(d.extra_d),
        "concrete_i": _automaton(d.concrete_i),
        "extra_i": _automaton(d.extra_i),
        "uobt_r_observed": [list(t) for t in d.uobt_r_observed],
        "uobt_d_observed": [list(t) for t in d.uobt_d_observed],
    }


def document(command: str, result: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "result": result}


def dump_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_report(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise ReportSchemaError(f"expected a report with schema_version {SCHEMA_VERSION}")
    for key in ("command", "result"):
        if key not in doc:
            raise ReportSchemaError(f"report lacks {key!r}")
    return doc


# --- text rendering --------------------------------------------------------

def _wtext(w) -> str:
    return "-" if w is None else format_trace(tuple(w["trace"]))


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def render_text(doc: dict) -> str:
    command, res = doc["command"], doc["result"]
    lines: list[str] = []
    if command == "classify":
        lines.append(f"evolution: {res['canonical']}")
        for name, value in res["flags"].items():
            lines.append(f"  {name:<17} {_yes(value)}")
        ev = res["evidence"]
        lines.append(f"  prev only: {_wtext(ev['prev_only'])}")
        lines.append(f"  next only: {_wtext(ev['next_only'])}")
        lines.append(f"  shared:    {_wtext(ev['shared'])}")
    elif command == "check":
        for step in ("dm_refines_rm", "im_refines_dm"):
            v = res[step]
            extra = "" if v["holds"] else f" (witness: {_wtext(v['witness'])})"
            lines.append(f"{step}: {'holds' if v['holds'] else 'fails'}{extra}")
        lines.append(f"chain holds: {_yes(res['chain_holds'])}")
    elif command in ("analyze", "decompose"):
        em = res["emergence"]
        lines.append(f"observed traces: {em['observed_count']} ({em['distinct_count']} distinct)")
        lines.append(f"emergent traces: {len(em['emergent_traces'])}")
        lines.append(f"guarantee violated: {_yes(em['guarantee_violated'])}")
        for row in em["traces"]:
            if row["origin"] != "NotEmergent":
                lines.append(
                    f"  {format_trace(tuple(row['trace']))}  origin={row['origin']} "
                    f"rm={int(row['in_rbt'])} dm={int(row['in_dbt'])} im={int(row['in_ibt'])} x{row['count']}"
                )
        lines.append(f"case: {em['case']['case']}")
        for name, parts in em["case"]["conjuncts"].items():
            lines.append(f"  {name}: " + ", ".join(f"{k}={_yes(v)}" for k, v in parts.items()))
        if "caveat" in em["case"]:
            lines.append(f"  note: {em['case']['caveat']}")
        if command == "decompose":
            dec = res["decomposition"]
            for part in ("concrete_d", "extra_d", "concrete_i", "extra_i"):
                lines.append(f"{part}: minimal DFA with {dec[part]['states']} states")
                lines.extend("    " + ln for ln in dec[part]["canonical"].splitlines())
            for part in ("uobt_r_observed", "uobt_d_observed"):
                traces = ", ".join(format_trace(tuple(t)) for t in dec[part]) or "(none)"
                lines.append(f"{part}: {traces}")
    elif command == "enumerate":
        lines.extend(format_trace(tuple(t)) for t in res["traces"])
    elif command == "gen":
        lines.append(f"scenario written to {res['out']}")
        lines.append(f"seed {res['seed']}, chain holds: {_yes(res['chain_holds'])}")
        lines.append(f"log traces: {res['log_size']}, injected: {len(res['injected'])}")
        lines.extend(f"note: {n}" for n in res["notes"])
    else:
        raise ReportSchemaError(f"unknown command {command!r}")
    return "\n".join(lines) + "\n"
