"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines alongside the pytest verdicts.
"""

import contextlib
import io
import json

import numpy as np
import pytest

from cone_fixpoint import (
    Affine,
    APriori,
    AugmentedPoint,
    FixedCount,
    IterationTrace,
    OmegaSpec,
    TolerancePolicy,
    a_priori_iterations,
    builtin_catalog,
    leq_lorentz,
    lorentz_contains,
    norm,
    reference_fixed_point,
    run,
    sample_omega,
    t_closed_form,
    validate_contraction,
    verify_certificate,
)
from cone_fixpoint.cli import main

RANDOM_INSTANCE_SEED = 20260808
STOP_EPS = 1e-10
N_RANDOM_INSTANCES = 100
STRICT = TolerancePolicy.exact()


def _report(k, label, ok, detail=""):
    print(f"[criterion {k}] {label}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"criterion {k} ({label}) failed {detail}"


def random_affine_instances(count=N_RANDOM_INSTANCES, seed=RANDOM_INSTANCE_SEED):
    """Seeded random affine contractions, spectral norm rescaled onto lambda."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        m = int(rng.integers(1, 9))
        lam = float(rng.uniform(0.1, 0.95))
        raw = rng.standard_normal((m, m))
        top = float(np.linalg.svd(raw, compute_uv=False)[0])
        spec = Affine(a=raw * (lam / top), b=rng.standard_normal(m), lam=lam)
        out.append((f"RANDOM_{i}", spec, rng.standard_normal(m)))
    return out


@pytest.fixture(scope="module")
def certified_runs():
    """Traces of all builtins plus the random instances, with 32 witnesses each."""
    problems = [(p.name, p.spec, p.x0) for p in builtin_catalog()]
    problems += random_affine_instances()
    runs = []
    for i, (name, spec, x0) in enumerate(problems):
        validate_contraction(spec)
        trace = run(spec, x0, APriori(STOP_EPS))
        om = OmegaSpec.for_problem(spec, x0)
        witnesses = sample_omega(om, 32, seed=1000 + i)
        runs.append((name, trace, witnesses))
    return runs


def test_criterion_1_monotone_increase(certified_runs):
    violations = 0
    checked = 0
    for name, trace, _ in certified_runs:
        dts = np.diff(trace.ts)
        steps = np.linalg.norm(np.diff(trace.xs, axis=0), axis=1)
        slack = 1e-10 * (1.0 + trace.ts[1:])
        violations += int(np.sum(dts < steps - slack))
        checked += dts.size
    _report(1, "cone-order monotonicity of every trace step", violations == 0,
            f"({checked} steps over {len(certified_runs)} instances, {violations} violations)")


def test_criterion_2_bounded_by_witnesses(certified_runs):
    violations = 0
    checked = 0
    for name, trace, witnesses in certified_runs:
        for w in witnesses:
            gap = w.t - trace.ts
            dist = np.linalg.norm(w.x - trace.xs, axis=1)
            violations += int(np.sum(gap < dist - 1e-9 * (1.0 + w.t)))
            checked += gap.size
    _report(2, "every witness dominates every trace point", violations == 0,
            f"({checked} comparisons, {violations} violations)")


def test_criterion_3_limit_is_lower_bound(certified_runs):
    violations = 0
    for name, trace, witnesses in certified_runs:
        t_star = trace.t_star
        x_star = trace.xs[-1]
        for w in witnesses:
            lhs = w.t - t_star
            rhs = norm(w.x - x_star) - (1e-9 * (1.0 + w.t) + STOP_EPS)
            if lhs < rhs:
                violations += 1
    _report(3, "limit point is a lower bound of the witness set", violations == 0,
            f"({sum(len(w) for _, _, w in certified_runs)} witnesses, {violations} violations)")


def test_criterion_4_error_bound_soundness():
    catalog = {p.name: p for p in builtin_catalog()}
    ok = True
    for name in ("AFFINE_1D", "ROTATION_2D", "KEPLER"):
        p = catalog[name]
        x_star = reference_fixed_point(p)
        trace = run(p.spec, p.x0, APriori(STOP_EPS))
        errs = np.linalg.norm(trace.xs - x_star, axis=1)
        ns = np.arange(trace.n_steps + 1)
        bounds = p.spec.lam**ns * trace.d / (1.0 - p.spec.lam)
        ok &= bool(np.all(errs <= bounds + 1e-12))
    # equality case: the 1-D monotone affine attains the bound at n = 3
    p = catalog["AFFINE_1D"]
    trace = run(p.spec, p.x0, APriori(STOP_EPS))
    err3 = abs(trace.xs[3, 0] - 2.0)
    bound3 = p.spec.lam**3 * trace.d / (1.0 - p.spec.lam)
    ok &= abs(err3 - bound3) <= 1e-12 and err3 == 0.25
    _report(4, "a-priori bound dominates the true error (equality at n=3)", ok)


def test_criterion_5_closed_form_consistency():
    worst = 0.0
    ok = True
    for p in builtin_catalog():
        trace = run(p.spec, p.x0, FixedCount(10_000))
        lam, d = p.spec.lam, trace.d
        for n in range(trace.n_steps + 1):
            cf = t_closed_form(d, lam, n)
            if cf == 0.0:
                ok &= trace.ts[n] == 0.0
            else:
                rel = abs(trace.ts[n] - cf) / abs(cf)
                worst = max(worst, rel)
                ok &= rel <= 1e-12
    _report(5, "iterated t agrees with the closed form to 1e-12 relative", ok,
            f"(worst relative deviation {worst:.3e})")


def test_criterion_6_oracle_convergence():
    catalog = {p.name: p for p in builtin_catalog()}
    ok = True
    for name in ("AFFINE_1D", "ROTATION_2D", "KEPLER"):
        p = catalog[name]
        trace = run(p.spec, p.x0, APriori(1e-8))
        ok &= norm(trace.final.x - reference_fixed_point(p)) <= 1e-8
    # direct enumeration oracle for the iteration-count formula
    n = 0
    while 0.5**n * 1.0 / (1.0 - 0.5) > 1e-6:
        n += 1
    ok &= n == 21 and a_priori_iterations(1.0, 0.5, 1e-6) == 21
    _report(6, "runs land within eps of oracle fixed points; count formula exact", ok)


def test_criterion_7_cone_and_order_axioms():
    samples = 10_000
    rng = np.random.default_rng(424242)
    violations = {"closure": 0, "pointed": 0, "reflexive": 0,
                  "transitive": 0, "antisymmetric": 0, "compatible": 0}

    def member(m, span=50, extra_choices=(0, 1, 2, 3)):
        x = rng.integers(-span, span + 1, m).astype(float)
        t = float(np.ceil(norm(x))) + float(rng.choice(extra_choices))
        return AugmentedPoint(x, t)

    for _ in range(samples):
        m = int(rng.integers(1, 7))

        u, v = member(m), member(m)
        s, t = int(rng.integers(0, 5)), int(rng.integers(0, 5))
        if not lorentz_contains(u.scaled(s) + v.scaled(t), STRICT):
            violations["closure"] += 1

        w = member(m)
        nonzero = w.t != 0.0 or bool(w.x.any())
        both = lorentz_contains(w, STRICT) and lorentz_contains(-w, STRICT)
        if both == nonzero:
            violations["pointed"] += 1

        a = AugmentedPoint(rng.integers(-50, 51, m).astype(float),
                           float(rng.integers(-50, 51)))
        if not leq_lorentz(a, a, STRICT):
            violations["reflexive"] += 1

        b = a + u
        c = b + v
        if not (leq_lorentz(a, b, STRICT) and leq_lorentz(b, c, STRICT)
                and leq_lorentz(a, c, STRICT)):
            violations["transitive"] += 1

        if u.t != 0.0 or u.x.any():
            if leq_lorentz(a + u, a, STRICT):
                violations["antisymmetric"] += 1

        mu = int(rng.integers(0, 11))
        z = AugmentedPoint(rng.integers(-50, 51, m).astype(float),
                           float(rng.integers(-50, 51)))
        if not leq_lorentz(a.scaled(mu) + z, b.scaled(mu) + z, STRICT):
            violations["compatible"] += 1

    total = sum(violations.values())
    _report(7, "cone and order axioms on 10^4 exact samples", total == 0,
            f"({violations})")


def test_criterion_8_tamper_detection():
    p = {q.name: q for q in builtin_catalog()}["AFFINE_1D"]
    honest = run(p.spec, p.x0, APriori(1e-8))
    rng = np.random.default_rng(99)
    flipped = 0
    trials = 100
    for _ in range(trials):
        n = int(rng.integers(0, honest.n_steps + 1))
        xs, ts = honest.xs.copy(), honest.ts.copy()
        if rng.uniform() < 0.5:
            ts[n] -= 1e-6
        else:
            xs[n, 0] += float(rng.choice([-1.0, 1.0])) * 1e-6
        tampered = IterationTrace(spec=honest.spec, x0=honest.x0, d=honest.d,
                                  xs=xs, ts=ts, stop_reason=honest.stop_reason)
        cert = verify_certificate(tampered, seed=0)
        if not cert.passed:
            flipped += 1
    _report(8, "every 1e-6 single-point perturbation flips the verdict", flipped == trials,
            f"({flipped}/{trials} detected)")


def test_criterion_9_round_trip(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    def quiet_main(argv):
        with contextlib.redirect_stdout(io.StringIO()):
            return main(argv)

    ok = True
    for q in builtin_catalog():
        trace_path = str(tmp_path / f"{q.name}.csv")
        cert_path = str(tmp_path / f"{q.name}.json")
        assert quiet_main(["solve", "--builtin", q.name, "--out", trace_path]) == 0
        code = quiet_main(["certify", "--builtin", q.name, "--verify", trace_path,
                           "--out", cert_path])
        doc = json.loads((tmp_path / f"{q.name}.json").read_text())
        ok &= code == 0 and doc["verdict"] == "pass"
        # byte-identical certification under a fixed seed
        a_path, b_path = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        assert quiet_main(["certify", "--builtin", q.name, "--seed", "5", "--out", a_path]) == 0
        assert quiet_main(["certify", "--builtin", q.name, "--seed", "5", "--out", b_path]) == 0
        ok &= (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    _report(9, "solve -> CSV -> verify round trip, byte-identical certificates", ok)
