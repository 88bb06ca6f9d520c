"""Canonical JSON-ready dictionaries for analysis results."""
from __future__ import annotations

import hashlib
import json

from . import __version__
from .arrangement import DerivativeArrangement, ExponentArrangement
from .criticality import AnalysisBundle, CriticalityReport
from .exactgeom import Fan
from .exactgeom.linalg import fmt_rational
from .repspec import Adjoint, DirectWeights, Dual, KernelSplit, Mult, Std, Sum, WeightMultiset


def q(x) -> str:
    return fmt_rational(x)


def qvec(v) -> list[str]:
    return [fmt_rational(x) for x in v]


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sha256(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def rep_json(e) -> dict:
    if isinstance(e, Std):
        return {"kind": "std", "factor": e.factor}
    if isinstance(e, Adjoint):
        return {"kind": "adjoint", "factor": e.factor}
    if isinstance(e, Dual):
        return {"kind": "dual", "of": rep_json(e.child)}
    if isinstance(e, Sum):
        return {"kind": "sum", "of": [rep_json(c) for c in e.children]}
    if isinstance(e, Mult):
        return {"kind": "mult", "of": rep_json(e.child), "n": e.n}
    if isinstance(e, DirectWeights):
        return {"kind": "weights", "weights": [{"coeffs": qvec(w), "mult": m} for w, m in e.entries]}
    raise TypeError(f"unknown representation node {e!r}")


def fan_json(f: Fan) -> dict:
    idx = {r: i for i, r in enumerate(f.rays)}
    cones = [[idx[r] for r in c.rays] for c in f.cones]
    return {
        "ambient": f.ambient,
        "rays": [list(r) for r in f.rays],
        "cones": sorted(cones, key=lambda c: (len(c), c)),
        "maximal": sorted(([idx[r] for r in c.rays] for c in f.maximal_cones), key=lambda c: (len(c), c)),
    }


def _ms_json(ms) -> list[dict]:
    return [{"coeffs": qvec(chi), "mult": m} for chi, m in ms]


def exponents_json(a: ExponentArrangement) -> list[dict]:
    f = a.fan
    idx = {r: i for i, r in enumerate(f.rays)}
    rows = [{"cone": [idx[r] for r in c.rays], "exponents": _ms_json(a.exponents_of(c))} for c in f.cones]
    rows.sort(key=lambda r: (len(r["cone"]), r["cone"]))
    return rows


def weights_json(w: WeightMultiset) -> list[dict]:
    return [{"coeffs": qvec(v), "mult": m} for v, m in w.entries]


def kernel_json(k: KernelSplit) -> dict:
    return {
        "a0": [list(v) for v in k.a0],
        "verdict": k.verdict.value,
        "a_prime": [list(v) for v in k.a_prime],
    }


def criticality_json(r: CriticalityReport) -> dict:
    return {
        "shift_mode": r.shift_mode,
        "shift": qvec(r.shift),
        "rays": [
            {"ray": list(x.ray), "chi_value": q(x.chi_value), "rho_value": q(x.rho_value), "critical": x.critical}
            for x in r.rays
        ],
        "verdict": r.verdict.value,
        "witnesses": [list(w) for w in r.witnesses],
    }


def bundle_json(b: AnalysisBundle) -> dict:
    out = {
        "group": [{"family": f, "rank": r} for f, r in b.group.factors],
        "representation": rep_json(b.rep),
        "root_datum": {
            "dim_a": b.root_datum.dim_a,
            "two_rho": list(b.root_datum.two_rho),
            "simple_roots": [list(a) for a in b.root_datum.simple_roots],
        },
        "weights": weights_json(b.weights),
        "kernel": kernel_json(b.kernel),
        "criticality": criticality_json(b.report),
    }
    if b.arrangement is not None:
        out["fan"] = fan_json(b.arrangement.fan)
        out["exponents"] = exponents_json(b.arrangement)
    return out


def derivative_json(d: DerivativeArrangement, source: Fan) -> dict:
    f = d.fan
    idx = {r: i for i, r in enumerate(f.rays)}
    sidx = {r: i for i, r in enumerate(source.rays)}
    rows = []
    for c in f.cones:
        src = d.star.source_of(c)
        rows.append(
            {
                "cone": [idx[r] for r in c.rays],
                "source_cone": [sidx[r] for r in src.rays],
                "exponents": _ms_json(d.exponents[c.rays]),
            }
        )
    rows.sort(key=lambda r: (len(r["cone"]), r["cone"]))
    return {
        "base_cone": [sidx[r] for r in d.base_cone.rays],
        "fan": fan_json(f),
        "exponents": rows,
    }


def provenance(input_bytes: bytes | str) -> dict:
    return {"input_sha256": sha256(input_bytes), "tool": "critfan", "version": __version__}


def fnum(x: float) -> float:
    """Floats are stored as repr-exact JSON numbers; this only normalizes -0.0."""
    x = float(x)
    return 0.0 if x == 0 else x
