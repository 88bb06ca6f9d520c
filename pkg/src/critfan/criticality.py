"""Criticality of exponent arrangements, checked ray by ray."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

from .arrangement import ExponentArrangement, build_arrangement
from .errors import CentralTorusActsTrivially
from .exactgeom import linalg as la
from .repspec import KernelSplit, RepExpr, WeightMultiset, action_kernel, haar_character, weights_of
from .rootdata import GroupSpec, RootDatum, build_root_datum


class Verdict(str, Enum):
    CRITICAL = "Critical"
    NON_CRITICAL = "NonCritical"
    CENTRAL_TRIVIAL = "CentralTorusActsTrivially"


ShiftMode = Union[str, Sequence]  # "none", "haar", or an explicit functional


@dataclass(frozen=True)
class RayCheck:
    ray: tuple[int, ...]
    chi_value: Fraction
    rho_value: Fraction
    critical: bool


@dataclass(frozen=True)
class CriticalityReport:
    rays: tuple[RayCheck, ...]
    verdict: Verdict
    witnesses: tuple[tuple[int, ...], ...]
    shift_mode: str
    shift: tuple[Fraction, ...]


def resolve_shift(mode: ShiftMode, w: WeightMultiset | None, n: int) -> tuple[str, tuple[Fraction, ...]]:
    if isinstance(mode, str):
        m = mode.lower()
        if m == "none":
            return "None", tuple(Fraction(0) for _ in range(n))
        if m == "haar":
            if w is None or not w.entries:
                return "Haar", tuple(Fraction(0) for _ in range(n))
            return "Haar", haar_character(w, n)
        raise ValueError(f"unknown shift mode {mode!r}")
    vec = la.frac_vector(mode)
    if len(vec) != n:
        raise ValueError(f"custom shift has length {len(vec)}, expected {n}")
    return "Custom", vec


def criticality_report(a: ExponentArrangement, rd: RootDatum, mode: ShiftMode = "none") -> CriticalityReport:
    name, d = resolve_shift(mode, a.weights, rd.dim_a)
    rho = rd.two_rho
    rows = []
    for c in a.fan.cones_of_dim(1):
        (v,) = c.rays
        rho_value = Fraction(la.dot(rho, v))
        vals = [la.dot(chi, v) + la.dot(d, v) for chi, _ in a.exponents_of(c)]
        crit = any(x == rho_value for x in vals)
        chi_value = next((x for x in vals if x == rho_value), vals[0])
        rows.append(RayCheck(v, Fraction(chi_value), rho_value, crit))
    rows.sort(key=lambda r: r.ray)
    witnesses = tuple(r.ray for r in rows if r.critical)
    verdict = Verdict.CRITICAL if witnesses else Verdict.NON_CRITICAL
    return CriticalityReport(tuple(rows), verdict, witnesses, name, d)


def avoid_functional(a: ExponentArrangement, rd: RootDatum, mode: ShiftMode = "none"):
    """Per-cone functional chi_C + shift - 2rho, whose zeros are the critical directions."""
    _, d = resolve_shift(mode, a.weights, rd.dim_a)

    def f(c):
        chi = a.chi(c)
        return tuple(x + y - z for x, y, z in zip(chi, d, rd.two_rho))

    return f


@dataclass(frozen=True, eq=False)
class AnalysisBundle:
    group: GroupSpec
    rep: RepExpr
    root_datum: RootDatum
    weights: WeightMultiset
    kernel: KernelSplit
    arrangement: ExponentArrangement | None
    report: CriticalityReport

    @property
    def verdict(self) -> Verdict:
        return self.report.verdict


def analyze(g: GroupSpec, e: RepExpr, mode: ShiftMode = "none") -> AnalysisBundle:
    rd = build_root_datum(g)
    w = weights_of(e, rd)
    ks = action_kernel(w, rd)
    try:
        arr = build_arrangement(rd, w)
    except CentralTorusActsTrivially:
        name, d = resolve_shift(mode, w, rd.dim_a)
        rep = CriticalityReport((), Verdict.CENTRAL_TRIVIAL, (), name, d)
        return AnalysisBundle(g, e, rd, w, ks, None, rep)
    return AnalysisBundle(g, e, rd, w, ks, arr, criticality_report(arr, rd, mode))
