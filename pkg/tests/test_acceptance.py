"""Acceptance criteria 1 to 9, each printing one PASS/FAIL line with its timing."""

import random
import time
from pathlib import Path

import pytest

from expq.config import Context, SolveConfig, Strategy
from expq.formula import FALSE, FORALL, NameSupply, atoms, disj_list, dvd, to_prenex
from expq.fragments import Fragment, atom_in_pc, formula_in_oct, in_sem
from expq.master import decide, decide_existential, decide_pres_power, master_procedure
from expq.metrics import metrics
from expq.oracle import bounded_witness_search, eval_qf, sample_assignments, sample_equivalence
from expq.parser import Dialect, parse, parse_file
from expq.presburger import candidate_witnesses, pres_qe, simplify
from expq.semenov import SemState, linearise, linearise_formula, nice_var, sem_cover
from expq.term import Term

import oracles
from randgen import rand_qf, rand_sem, rand_sentence

VERDICTS = Path(__file__).resolve().parent.parent / "corpus" / "verdicts"


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, started: float, limit: float | None, detail: str = "") -> None:
        took = time.perf_counter() - started
        in_time = limit is None or took < limit
        status = "PASS" if ok and in_time else "FAIL"
        budget = f" (limit {limit:g}s)" if limit else ""
        with capsys.disabled():
            print(f"\ncriterion {n}: {status} in {took:.2f}s{budget} {detail}".rstrip())
        assert ok, detail
        assert in_time, f"took {took:.1f}s"

    return emit


def test_criterion_1_linearise_examples(report):
    t0 = time.perf_counter()
    px = Term.power("x")
    one = linearise_formula(dvd(20, px - 2), ("x",))
    none = linearise_formula(dvd(6, px - 3), ("x",))
    ok = one == parse("abs(x) = 1") and none is FALSE
    report(1, ok, t0, 1.0, "20 | pow(x) - 2 -> |x| = 1, 6 | pow(x) - 3 -> false")


def test_criterion_2_congruence_oracle(report):
    t0 = time.perf_counter()
    bad = oracles.congruence_disagreements(128)
    report(2, not bad, t0, 60.0, f"disagreements {len(bad)} over q <= 128, x in [0, 3q]")


def test_criterion_3_number_theory_facts(report):
    t0 = time.perf_counter()
    counts = {
        "lambda of b*x vs power": len(oracles.lam_multiple_below_power_failures()),
        "congruence progression": len(oracles.pow_congruence_progression_failures(64)),
        "lcm of totients": len(oracles.lcm_totient_bound_failures(30, 3)),
        "mixed lcm with totients": oracles.mixed_lcm_totient_failures(30, 3),
        "lambda sandwich": len(oracles.lambda_sandwich_failures(500, seed=0)),
    }
    report(3, not any(counts.values()), t0, 60.0, f"violations {counts}")


def _presqe_instance_ok(phi, rng) -> bool:
    psi = disj_list(p for _, p in pres_qe("x", ("x",), phi))
    names = sorted(phi.free_vars() - {"x"})
    pw = {v for a in atoms(phi) for v, _ in a.term.pows}
    for env in sample_assignments(names, pw, seed=rng.randrange(2**32), box=2, n_random=6, max_box=25):
        truth = any(eval_qf(phi, {**env, "x": v}) for v in candidate_witnesses("x", phi, env, window=False))
        if eval_qf(psi, env) != truth:
            return False
    return True


def test_criterion_4_cover_by_sampling(report):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    bad_simplify = bad_presqe = 0
    for i in range(500):
        f = rand_qf(rng, 2, lin=("x",), pw=("y",), div_p=0.5, moduli=(2, 3, 4))
        rep = sample_equivalence(disj_list(simplify(f)), f, seed=i, n_random=30)
        bad_simplify += rep.verdict != "Agree"
    done = 0
    while done < 500:
        phi = rand_qf(rng, 2, lin=("x", "y"), pw=("z",), coeff=3, const=10, div_p=0.3, moduli=(2, 3))
        if "x" not in phi.free_vars():
            continue
        bad_presqe += not _presqe_instance_ok(phi, rng)
        done += 1
    report(4, bad_simplify == bad_presqe == 0, t0, 300.0, f"simplify {bad_simplify}/500, presQE {bad_presqe}/500 disagreeing")


def test_criterion_5_semcover_structure(report):
    t0 = time.perf_counter()
    rng = random.Random(55)
    bad = checked = 0
    while checked < 200:
        phi = rand_sem(rng)
        xs = tuple(v for v in ("x", "y") if v in phi.free_vars())
        if not xs or not in_sem(phi):
            continue
        state = SemState(NameSupply(phi.free_vars() | set(xs)))
        out = sem_cover(xs, phi, state)
        h = metrics(phi).homterms_count
        ok = all(k == FORALL for k, _ in state.pi_prime) and len(state.pi_prime) <= h
        for ys, psi in out:
            v = nice_var(psi, ys)
            ok = ok and v is not None and all(atom_in_pc(a) for a in atoms(psi) if a.term.pow_coeff(v))
        bad += not ok
        checked += 1
    report(5, bad == 0, t0, None, f"violations {bad}/200")


def test_criterion_6_parameter_tables(report):
    t0 = time.perf_counter()
    rng = random.Random(66)
    violations: list[str] = []
    calls = 0

    def ctx():
        return Context(SolveConfig(check_tables=True))

    for _ in range(150):
        f = rand_qf(rng, 2, lin=("x", "y", "z"), coeff=3, div_p=0.3, moduli=(2, 3, 4))
        if "x" in f.free_vars():
            c = ctx()
            pres_qe("x", ("x",), f, c)
            violations += c.violations
            calls += 1
    for _ in range(100):
        phi = rand_sem(rng)
        xs = tuple(v for v in ("x", "y") if v in phi.free_vars())
        if xs and in_sem(phi):
            c = ctx()
            sem_cover(xs, phi, SemState(NameSupply(phi.free_vars() | set(xs))), c)
            violations += c.violations
            calls += 1
    for _ in range(10):
        S = [(("x", "y"), rand_qf(rng, 2, pw=("x", "y"), coeff=4, const=30, div_p=0.3)) for _ in range(10)]
        c = ctx()
        linearise(S, Fragment.QF, c)
        violations += c.violations
        calls += 1
    for _ in range(40):
        f = rand_sentence(rng, ("x", "y", "z"), depth=2, coeff=2, const=6, moduli=(2,))
        c = ctx()
        master_procedure(to_prenex(f), ctx=c)
        violations += c.violations
        calls += 1
    for path in sorted(VERDICTS.glob("pp_*.fml")):
        d = decide_pres_power(parse_file(path, Dialect.PRESPOWER), SolveConfig(check_tables=True))
        violations += d.violations
        calls += 1
    report(6, not violations, t0, 300.0, f"{len(violations)} violations over {calls} instrumented runs")


def _header(path: Path) -> dict[str, str]:
    out = {}
    for line in path.read_text().splitlines():
        if line.startswith("# ") and ": " in line:
            k, v = line[2:].split(": ", 1)
            out[k.strip()] = v.strip()
    return out


def test_criterion_7_verdict_corpus(report):
    t0 = time.perf_counter()
    files = sorted(VERDICTS.glob("*.fml"))
    wrong: list[str] = []
    classes = set()
    for path in files:
        h = _header(path)
        classes.add(h["class"])
        want = h["expect"] == "VALID"
        f = parse_file(path, Dialect.parse(h["dialect"]))
        if h["dialect"] == "prespower":
            got = [decide_pres_power(f).verdict]
        else:
            got = [decide(f).verdict]
        if h["class"] == "existential":
            p = to_prenex(f)
            got.append(decide_existential(p, SolveConfig(strategy=Strategy.BACKTRACKING)))
            if want and bounded_witness_search(p, 10) is None:
                wrong.append(f"{path.name}: no witness in [-10, 10]")
        if any(g != want for g in got):
            wrong.append(f"{path.name}: expected {h['expect']}, got {got}")
    ok = not wrong and len(files) >= 30 and classes == {"existential", "alternating", "pa", "oct"}
    report(7, ok, t0, 600.0, f"{len(files)} sentences, mismatches {wrong}")


def test_criterion_8_pure_pa(report):
    t0 = time.perf_counter()
    rng = random.Random(88)
    wrong = 0
    semcover = 0
    n = 0
    while n < 50:
        f = rand_sentence(rng, ("x", "y"), depth=2, coeff=1, const=3, div_p=0.3, moduli=(2, 3))
        p = to_prenex(f)
        if len(p.prefix) < 2:
            continue
        d = decide(f)
        semcover += d.counters.get("semcover", 0)
        wrong += d.verdict != oracles.pa_reference(p)
        n += 1
    report(8, wrong == 0 and semcover == 0, t0, None, f"mismatches {wrong}/50, semCover calls {semcover}")


def test_criterion_9_octagon_pipeline(report):
    t0 = time.perf_counter()
    problems: list[str] = []
    for path in sorted(VERDICTS.glob("pp_*.fml")) + [VERDICTS.parent / "unbounded_powers.fml"]:
        d = decide_pres_power(parse_file(path, Dialect.PRESPOWER), SolveConfig(check_tables=True))
        stage = d.stages["octagon"]
        if not formula_in_oct(stage.matrix):
            problems.append(f"{path.name}: stage three not in Oct")

        def watch(xs, pending, done, name=path.name):
            for g in [g for _, g in pending] + list(done):
                m = metrics(g)
                if m.maxvars > 2 or m.norminf_homterms > 1:
                    problems.append(f"{name}: maxvars {m.maxvars}, homterms {m.norminf_homterms}")

        master_procedure(stage, SolveConfig(Fragment.QF), observer=watch)
        problems += [f"{path.name}: {v}" for v in d.violations]
    report(9, not problems, t0, None, f"problems {problems[:5]}")
