"""Exit criteria for the package.  Each test records one PASS/FAIL line,
printed in the terminal summary."""

import contextlib
import io
import random
import subprocess
import sys
import time

import pytest

from armtrace.cli import run
from armtrace.emergence import (
    Case,
    OriginPhase,
    TraceLog,
    decompose_extended,
    extract_emergent,
    localize_case,
    per_trace_origin,
)
from armtrace.lang import combine, complement, equivalent, from_traces, includes, is_empty
from armtrace.relations import ModelChain, check_chain, classify_evolution
from armtrace.scenario import ScenarioConfig, generate

import oracle
from helpers import T, words

RESULTS: list[str] = []

POPULATION_SIZE = 1000
CHAINS = 200
SCENARIOS = 200

OPS = {
    "union": lambda x, y: x or y,
    "intersection": lambda x, y: x and y,
    "difference": lambda x, y: x and not y,
}


@contextlib.contextmanager
def criterion(number: int, title: str, budget_s: float | None = None):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        RESULTS.append(f"[FAIL] {number}. {title}: {exc}")
        raise
    elapsed = time.perf_counter() - start
    if budget_s is not None and elapsed > budget_s:
        RESULTS.append(f"[FAIL] {number}. {title}: {elapsed:.1f}s exceeds {budget_s:.0f}s")
        pytest.fail(f"took {elapsed:.1f}s, limit {budget_s}s")
    RESULTS.append(f"[PASS] {number}. {title} ({elapsed:.2f}s)")


@pytest.fixture(scope="module")
def population():
    rng = random.Random(20260101)
    return [oracle.random_pair(rng) for _ in range(POPULATION_SIZE)]


def _scenario_cfg(seed: int, gaps: bool) -> ScenarioConfig:
    extra = {p: 1 + seed % 2 for p in (OriginPhase.REQUIREMENTS_GAP, OriginPhase.DESIGN_GAP, OriginPhase.IMPLEMENTATION_GAP)}
    return ScenarioConfig(
        seed=seed,
        alphabet_size=2 + seed % 3,
        states_per_model=2 + seed % 7,
        extra_traces_per_phase=extra if gaps else {},
        log_size=10,
        max_trace_len=6,
    )


def test_1_language_operations_match_oracle(population):
    with criterion(1, f"language operations agree with brute force on {POPULATION_SIZE} pairs", 60):
        for a, b in population:
            for kind, op in OPS.items():
                r = combine(kind, a, b)
                for trace, (xa, xb, xr) in oracle.walk([a, b, r]):
                    assert xr == op(xa, xb), (kind, trace)
            for trace, (xa, xc) in oracle.walk([a, complement(a)]):
                assert xc != xa, ("complement", trace)
            for left, right in ((a, b), (b, a)):
                v = includes(left, right)
                expected = oracle.first([right, left], lambda xr, xl: xr and not xl)
                assert v.holds == (expected is None)
                if expected is not None:
                    assert v.witness.trace == expected
            assert equivalent(a, b) == oracle.same_language(a, b)


def test_2_evolution_flags_match_oracle(population):
    with criterion(2, f"evolution flags equal their set conditions on {POPULATION_SIZE} pairs", 60):
        overlaps = 0
        for prev, nxt in population:
            r = classify_evolution(prev, nxt)
            seen = {acc for _, acc in oracle.walk([prev, nxt])}
            prev_only, next_only, shared = (True, False) in seen, (False, True) in seen, (True, True) in seen
            assert r.abstraction_holds == (not prev_only)
            assert r.refinement_holds == (not next_only)
            assert r.total_change_holds == (not shared)
            assert r.strict_evolution_holds == (shared and prev_only and next_only)
            true_flags = sum(r.flags.values())
            if true_flags > 1:
                overlaps += 1
                identical = not prev_only and not next_only
                some_empty = oracle.first([prev], bool) is None or oracle.first([nxt], bool) is None
                assert identical or some_empty
            assert true_flags >= 1
        assert overlaps > 0


def test_3_refinement_chain_guarantees_no_emergence(tmp_path):
    with criterion(3, f"{CHAINS} refining chains with conforming logs report no emergence", 30):
        for seed in range(CHAINS):
            out_dir = tmp_path / f"s{seed}"
            cfg = _scenario_cfg(seed, gaps=False)
            code = run(["gen", "--seed", str(seed), "--alphabet-size", str(cfg.alphabet_size),
                        "--states", str(cfg.states_per_model), "--log-size", "10", "--out", str(out_dir),
                        "--format", "machine"], stdout=io.StringIO(), stderr=io.StringIO())
            assert code == 0
            out = io.StringIO()
            code = run(["--format", "machine", "analyze", *(str(out_dir / f) for f in ("rm.aut", "dm.aut", "im.aut", "log.txt"))],
                       stdout=out, stderr=io.StringIO())
            assert '"chain_holds": true' in out.getvalue()
            assert '"emergent_traces": []' in out.getvalue()
            assert code == 0, seed


def _brute_conjuncts(chain: ModelChain, ebt):
    seen = {acc for _, acc in oracle.walk([chain.rm, chain.dm, chain.im, ebt])}

    def exists(pred):
        return any(pred(*acc) for acc in seen)

    def strict(i):
        return {
            "overlaps": exists(lambda *x: x[i] and x[3]),
            "model_not_in_ebt": exists(lambda *x: x[i] and not x[3]),
            "ebt_not_in_model": exists(lambda *x: x[3] and not x[i]),
        }

    return {
        "Case1": strict(0),
        "Case2": {"ebt_in_prior": not exists(lambda *x: x[3] and not x[0]), **strict(1)},
        "Case3": {"ebt_in_prior": not exists(lambda *x: x[3] and not x[1]), **strict(2)},
    }


def test_4_origin_localization_recovers_ground_truth():
    with criterion(4, f"injected origins and case conjuncts recovered on {SCENARIOS} scenarios", 60):
        per_phase = dict.fromkeys(OriginPhase, 0)
        for seed in range(SCENARIOS):
            s = generate(_scenario_cfg(seed, gaps=True))
            report = extract_emergent(s.log, s.chain)
            for trace, origin in s.injected.items():
                assert per_trace_origin(trace, s.chain) is origin
                assert report.per_trace[trace].origin is origin
                per_phase[origin] += 1
            ebt = from_traces(report.emergent_traces, s.chain.alphabet)
            expected = _brute_conjuncts(s.chain, ebt)
            case = localize_case(ebt, s.chain)
            assert case.conjuncts == expected
            assert report.case == case
        for phase in (OriginPhase.REQUIREMENTS_GAP, OriginPhase.DESIGN_GAP, OriginPhase.IMPLEMENTATION_GAP):
            assert per_phase[phase] >= 50, per_phase


def test_5_decomposition_soundness():
    with criterion(5, "concrete + extra parts reproduce each phase; design extra disjoint from rm"):
        for seed in range(SCENARIOS):
            s = generate(_scenario_cfg(seed, gaps=True))
            d = decompose_extended(s.chain, extract_emergent(s.log, s.chain))
            assert oracle.same_language(combine("union", d.concrete_d, d.extra_d), s.chain.dm)
            assert oracle.same_language(combine("union", d.concrete_i, d.extra_i), s.chain.im)
            assert oracle.first([d.extra_d, s.chain.rm], lambda x, y: x and y) is None
            assert equivalent(combine("union", d.concrete_d, d.extra_d), s.chain.dm)
            assert is_empty(combine("intersection", d.extra_d, s.chain.rm)).holds
            assert not set(d.uobt_r_observed) & set(d.uobt_d_observed)


def test_6_worked_example():
    with criterion(6, "worked three-phase example", 1):
        chain = ModelChain(words("a", "ab", "b"), words("a", "ab"), words("ab"))
        assert check_chain(chain).chain_holds
        r = extract_emergent(TraceLog((T("ab"), T("ba"), T("b"), T("a"))), chain)
        assert set(r.emergent_traces) == {T("ba"), T("b"), T("a")}
        origins = {t: r.per_trace[t].origin for t in r.emergent_traces}
        assert origins == {
            T("ba"): OriginPhase.REQUIREMENTS_GAP,
            T("b"): OriginPhase.DESIGN_GAP,
            T("a"): OriginPhase.IMPLEMENTATION_GAP,
        }
        assert r.guarantee_violated
        assert r.case.case is Case.CASE1


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "armtrace", *map(str, args)], capture_output=True)
    return proc.returncode, proc.stdout


def test_7_determinism(tmp_path):
    with criterion(7, "repeated CLI invocations give byte-identical machine output"):
        bundle = tmp_path / "bundle"
        gen = ["--format", "machine", "gen", "--seed", "77", "--alphabet-size", "3", "--states", "5",
               "--requirements-gaps", "2", "--design-gaps", "2", "--implementation-gaps", "2", "--out", bundle]
        first = _cli(*gen)
        files_first = {p.name: p.read_bytes() for p in bundle.iterdir()}
        second = _cli(*gen)
        files_second = {p.name: p.read_bytes() for p in bundle.iterdir()}
        assert first == second and first[0] == 0
        assert files_first == files_second
        models = [bundle / f for f in ("rm.aut", "dm.aut", "im.aut")]
        for argv in (
            ["classify", models[0], models[2]],
            ["check", *models],
            ["analyze", *models, bundle / "log.txt"],
            ["decompose", *models, bundle / "log.txt"],
            ["enumerate", models[0], "--max-len", "4"],
        ):
            one, two = _cli("--format", "machine", *argv), _cli("--format", "machine", *argv)
            assert one == two, argv
            assert one[1]
