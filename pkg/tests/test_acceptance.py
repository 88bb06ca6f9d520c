"""End-to-end acceptance checks, one test per criterion.

Each test records PASS or FAIL with a short detail; the lines are printed in
the terminal summary.  Run on their own with ``pytest tests/test_acceptance.py``.
"""
import math
import random
import time
from fractions import Fraction

import pytest

from critfan import selftest
from critfan.arrangement import build_arrangement, check_compatibility, eval_exponent, refine_arrangement
from critfan.asymlab import BUILTINS, AsymFun1D, invariance_check, mellin_regularize, plain_integral
from critfan.cli import main
from critfan.criticality import Verdict, analyze, avoid_functional, criticality_report
from critfan.errors import CriticalExponent
from critfan.exactgeom import Cone, Sign, is_valid_fan, relint_sign
from critfan.exactgeom.linalg import dot
from critfan.randomized import random_instance
from critfan.repspec import Adjoint, DirectWeights, Std, Sum, weights_of
from critfan.rootdata import GroupSpec, build_root_datum
from critfan.simulation import POISSON_TOL, RESIDUAL_BOUND, SLOPE_TOL, simulate

RANDOM_SEED = 0
RANDOM_COUNT = 200


def _random_arrangements():
    rng = random.Random(RANDOM_SEED)
    out = []
    for _ in range(RANDOM_COUNT):
        g, e = random_instance(rng, max_rank=4, max_weights=10)
        rd = build_root_datum(g)
        out.append((rd, build_arrangement(rd, weights_of(e, rd))))
    return out


@pytest.fixture(scope="module")
def random_arrangements():
    t0 = time.perf_counter()
    arrs = _random_arrangements()
    return arrs, time.perf_counter() - t0


def test_kudla_rallis(record):
    t0 = time.perf_counter()
    bad = []
    for m in range(2, 6):
        for n in range(1, 11):
            b = analyze(selftest.kudla_rallis_group(m), selftest.kudla_rallis_rep(m, n), "none")
            if (b.verdict is Verdict.CRITICAL) != (m - 1 <= n <= 2 * (m - 1)):
                bad.append((m, n))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 5
    record("Kudla-Rallis table, m in 2..5, n in 1..10", ok, f"{40 - len(bad)}/40 rows, {dt:.2f}s")
    assert not bad
    assert dt < 5


def test_gross_prasad(record):
    t0 = time.perf_counter()
    bad = []
    groups = [("SO_odd", m, 1) for m in range(1, 6)] + [("SO_even", m, 2) for m in range(3, 6)]
    for fam, m, tops in groups:
        b = analyze(GroupSpec.of((fam, m)), Sum(Adjoint(), Std()), "none")
        if b.verdict is not Verdict.NON_CRITICAL or any(r.critical for r in b.report.rays):
            bad.append(f"{fam}{m} critical")
        if len(b.arrangement.fan.maximal_cones) != tops:
            bad.append(f"{fam}{m} has {len(b.arrangement.fan.maximal_cones)} maximal cones")
    dt = time.perf_counter() - t0
    record("Gross-Prasad B_1..B_5, D_3..D_5 never critical", not bad and dt < 5, f"{dt:.2f}s {'; '.join(bad)}".strip())
    assert not bad
    assert dt < 5


def test_tate(record):
    g = GroupSpec.of(("Torus", 1))
    plain = analyze(g, Std(), "none").report
    haar = analyze(g, Std(), "haar").report
    ok = (
        plain.verdict is Verdict.CRITICAL
        and plain.witnesses == ((-1,),)
        and haar.verdict is Verdict.CRITICAL
        and haar.witnesses == ((1,),)
    )
    record("Tate: witness -1, moves to +1 under the Haar shift", ok, f"{plain.witnesses} / {haar.witnesses}")
    assert ok


def _instance_problems(rd, a) -> list[str]:
    fan = a.fan
    probs = [f"fan: {d}" for d in is_valid_fan(fan)]
    den, ints = a.weights.scaled
    for c in fan.cones:
        for iv, _ in ints:
            if relint_sign(iv, c) is Sign.MIXED:
                probs.append(f"weight {iv} mixed on {c!r}")
    probs += [f"compat: {d}" for d in check_compatibility(a)]
    for c in fan.cones:
        chi = a.chi(c)
        for r in c.rays:
            if dot(chi, r) != dot(a.chi(fan.get([r])), r):
                probs.append(f"face restriction fails at {r} in {c!r}")
        back = Cone.from_h(c.ineqs, c.eqs, c.ambient)
        if back != c or Cone.from_rays(back.rays, c.ambient) != c or back.ineqs != c.ineqs:
            probs.append(f"dd round trip moved {c!r}")
    return probs


def test_random_property_suite(record, random_arrangements):
    arrs, build_time = random_arrangements
    t0 = time.perf_counter()
    bad = []
    for k, (rd, a) in enumerate(arrs):
        probs = _instance_problems(rd, a)
        if probs:
            bad.append(f"#{k}: {probs[0]}")
    dt = build_time + time.perf_counter() - t0
    ok = not bad and dt < 60
    record(f"fan/arrangement properties on {RANDOM_COUNT} random instances", ok, f"{len(bad)} bad, {dt:.1f}s")
    assert not bad, bad[:5]
    assert dt < 60


def _support_points(fan, rng, count):
    rays = fan.support.rays
    pts = []
    for _ in range(count):
        coeffs = [Fraction(rng.randint(0, 9), rng.randint(1, 7)) for _ in rays]
        pts.append(tuple(sum(c * r[i] for c, r in zip(coeffs, rays)) for i in range(fan.ambient)))
    return pts


def test_refinement_stability(record, random_arrangements):
    arrs, _ = random_arrangements
    rng = random.Random(1)
    bad = []
    checked = 0
    for k, (rd, a) in enumerate(arrs):
        if criticality_report(a, rd).verdict is not Verdict.NON_CRITICAL:
            continue
        checked += 1
        r = refine_arrangement(a, avoid=avoid_functional(a, rd), strategy="interior")
        if criticality_report(r, rd).verdict is not Verdict.NON_CRITICAL:
            bad.append(f"#{k}: refinement became critical")
            continue
        for p in _support_points(a.fan, rng, 50):
            if eval_exponent(r, p) != eval_exponent(a, p):
                bad.append(f"#{k}: eval_exponent moved at {p}")
                break
    record("refinement keeps NonCritical and eval_exponent", not bad and checked > 0, f"{checked} instances, {len(bad)} bad")
    assert checked > 0
    assert not bad, bad[:5]


NUMERIC_MODELS = {
    "GL_1 std": (GroupSpec.of(("GL", 1)), Std()),
    "+-1 pair": (GroupSpec.of(("Torus", 1)), DirectWeights([(1,), (-1,)])),
    "SO_odd 2 std": (GroupSpec.of(("SO_odd", 2)), Std()),
    "Sp 2 std": (GroupSpec.of(("Sp", 2)), Std()),
}


def test_numeric_asymptotics(record):
    t0 = time.perf_counter()
    bad = []
    fits = 0
    worst_gap = worst_res = worst_poisson = 0.0
    for name, (g, e) in NUMERIC_MODELS.items():
        rd = build_root_datum(g)
        out = simulate(weights_of(e, rd), 1e-3, 1e-1, 9)
        per_cone: dict = {}
        for f in out["fits"]:
            fits += 1
            per_cone.setdefault(str(f["cone"]), 0)
            per_cone[str(f["cone"])] += 1
            worst_gap = max(worst_gap, f["gap"])
            worst_res = max(worst_res, f["scaled_residual"])
            if f["gap"] > SLOPE_TOL or f["scaled_residual"] > RESIDUAL_BOUND:
                bad.append(f"{name} {f['direction']}: gap {f['gap']:.3g}, residual {f['scaled_residual']:.3g}")
        if name.startswith(("SO", "Sp")) and any(v < 3 for v in per_cone.values()):
            bad.append(f"{name}: fewer than 3 directions in some maximal cone")
        for p in out["poisson"]:
            worst_poisson = max(worst_poisson, p["residual"])
            if p["residual"] > POISSON_TOL:
                bad.append(f"{name} poisson {p['residual']:.3g}")
    dt = time.perf_counter() - t0
    detail = f"{fits} fits, max gap {worst_gap:.3g}, max residual {worst_res:.3g}, poisson {worst_poisson:.2g}, {dt:.1f}s"
    record("numeric asymptotics in the torus model", not bad and dt < 120, detail)
    assert not bad, bad
    assert dt < 120


def test_regularized_integral(record):
    t0 = time.perf_counter()
    bad = []
    v = mellin_regularize(BUILTINS["t_exp"])
    if abs(v - 1) > 1e-8:
        bad.append(f"t_exp {v!r}")
    lognormal = AsymFun1D(lambda t: math.exp(-math.log(t) ** 2), name="lognormal")
    for g in (BUILTINS["bessel"], lognormal):
        if abs(mellin_regularize(g) - plain_integral(g)) > 1e-8:
            bad.append(f"{g.name} disagrees with plain quadrature")
    worst = 0.0
    for name in ("t_exp", "bessel", "sqrt_cut", "two_ended"):
        for u in (0.1, 0.5, 2.0, 10.0):
            worst = max(worst, invariance_check(BUILTINS[name], u))
    if worst > 1e-7:
        bad.append(f"invariance defect {worst:.3g}")
    try:
        mellin_regularize(BUILTINS["exp"])
        bad.append("constant tail not rejected")
    except CriticalExponent:
        pass
    dt = time.perf_counter() - t0
    record("regularized Mellin integral", not bad and dt < 10, f"max invariance defect {worst:.2g}, {dt:.2f}s")
    assert not bad, bad
    assert dt < 10


def test_selftest_determinism(record, capsys):
    def digest():
        code = main(["selftest"])
        err = capsys.readouterr().err
        line = next(x for x in err.splitlines() if x.startswith("report sha256:"))
        return line.split(":", 1)[1].strip(), code

    (h1, c1), (h2, c2) = digest(), digest()
    record("selftest twice gives identical hashes", h1 == h2 and c1 == c2 == 0, f"{h1[:16]}, exit {c1}/{c2}")
    assert h1 == h2
    assert c1 == c2 == 0
