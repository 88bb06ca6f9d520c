"""Numeric cross-checks of an arrangement in the split-torus desk model."""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .arrangement import build_arrangement, eval_exponent
from .asymlab import (
    LatticeSumProbe,
    ProbeFunction,
    TorusAction,
    fit_exponent,
    geometric_grid,
    poisson_identity_check,
    residual_check,
)
from .errors import UnsupportedForSimulation
from .exactgeom import linalg as la
from .repspec import DirectWeights, WeightMultiset, weights_of
from .rootdata import GroupSpec, build_root_datum

SLOPE_TOL = 0.05
POISSON_TOL = 1e-10
RESIDUAL_BOUND = 1.0


def torus_model(w: WeightMultiset) -> tuple[TorusAction, GroupSpec, DirectWeights]:
    """Replace the group by its split torus acting with the same weights."""
    rows = []
    for v, m in w.entries:
        if any(x.denominator != 1 for x in v):
            raise UnsupportedForSimulation(f"weight {[str(x) for x in v]} is not integral")
        rows.extend([tuple(int(x) for x in v)] * m)
    if len(rows) > 8:
        raise UnsupportedForSimulation(f"representation has dimension {len(rows)} > 8")
    action = TorusAction(tuple(rows))
    r = len(rows[0])
    return action, GroupSpec((("Torus", r),)), DirectWeights(list(w.entries))


def interior_directions(rays, weight_rows, count: int = 3) -> list[tuple[Fraction, ...]]:
    """Distinct interior directions of the cone spanned by ``rays``, normalized so max |<w, lam>| = 1."""
    k = len(rays)
    patterns = [(1,) * k] + [tuple(2 if i == j else 1 for i in range(k)) for j in range(k)]
    out = []
    for coef in patterns:
        lam = tuple(sum(Fraction(c * r[i]) for c, r in zip(coef, rays)) for i in range(len(rays[0])))
        scale = max(abs(la.dot(row, lam)) for row in weight_rows)
        if scale:
            lam = tuple(x / scale for x in lam)
        if lam not in out:
            out.append(lam)
        if len(out) == count:
            break
    return out


def simulate(w: WeightMultiset, t_min: float = 1e-3, t_max: float = 1e-1, points: int = 9) -> dict:
    action, g, dw = torus_model(w)
    rd = build_root_datum(g)
    arr = build_arrangement(rd, weights_of(dw, rd))
    f = ProbeFunction.gaussian()
    grid = geometric_grid(t_min, t_max, points)
    rows = []
    for c in arr.fan.maximal_cones:
        for lam in interior_directions(c.rays, action.weight_matrix):
            probe = LatticeSumProbe(action, f, lam, grid)
            slope = fit_exponent(probe)
            pred = eval_exponent(arr, lam)
            gap = abs(slope - float(pred))
            res = residual_check(probe, c, lam)
            rows.append(
                {
                    "cone": [list(r) for r in c.rays],
                    "direction": [la.fmt_rational(x) for x in lam],
                    "slope": slope,
                    "prediction": la.fmt_rational(pred),
                    "gap": gap,
                    "slope_ok": gap <= SLOPE_TOL,
                    "scaled_residual": res,
                    "residual_ok": res <= RESIDUAL_BOUND,
                }
            )
    r = action.r
    poisson = []
    for t in [(0.5,) * r, (2.0,) * r, tuple(1 / 3 if i % 2 == 0 else 3.0 for i in range(r))]:
        res = poisson_identity_check(action, f, t)
        poisson.append({"t": list(t), "residual": res, "ok": res <= POISSON_TOL})
    rows.sort(key=lambda x: (x["cone"], x["direction"]))
    ok = all(x["slope_ok"] and x["residual_ok"] for x in rows) and all(p["ok"] for p in poisson)
    return {
        "weight_matrix": [list(row) for row in action.weight_matrix],
        "grid": {"t_min": t_min, "t_max": t_max, "points": points},
        "fits": rows,
        "poisson": poisson,
        "all_ok": ok,
    }
