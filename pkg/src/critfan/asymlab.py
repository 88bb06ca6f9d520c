"""Floating-point checks of the exact predictions.

Desk model: a split torus of rank r acts diagonally on R^d with integer
weights, and f is a (scaled) Gaussian.  Everything factorizes over
coordinates, so every lattice sum is a product of one-dimensional theta sums.

Regularized Mellin integral.  For g(t) ~ c0 t^a0 at 0 and ~ c_inf t^a_inf
at infinity (up to rapid decay)::

    R(g) = int_0^1 (g - c0 t^a0) dt/t + int_1^inf (g - c_inf t^a_inf) dt/t
           + c0/a0 - c_inf/a_inf

Twisting by t^s, int_0^1 c0 t^(a0+s) dt/t = c0/(a0+s) and
int_1^inf c_inf t^(a_inf+s) dt/t = -c_inf/(a_inf+s) where they converge, so
evaluating the continuation at s = 0 gives exactly the two constants above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import integrate

from .errors import (
    CriticalExponent,
    GridTooShort,
    LatticeOverflow,
    OutsideRelint,
    QuadratureFailure,
    UnsupportedForSimulation,
)
from .exactgeom import Cone, Sign, relint_sign

MAX_SCALE = 1e12
MAX_RADIUS = 2_000_000
TAIL_TOL = 1e-16
MAX_WEIGHT = 20
MAX_D = 8
MAX_R = 4


# model objects ------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusAction:
    weight_matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.weight_matrix)
        object.__setattr__(self, "weight_matrix", rows)
        if not rows:
            raise UnsupportedForSimulation("action needs at least one coordinate")
        if len(rows) > MAX_D:
            raise UnsupportedForSimulation(f"d = {len(rows)} coordinates exceeds the limit {MAX_D}")
        r = len(rows[0])
        if not 1 <= r <= MAX_R or any(len(row) != r for row in rows):
            raise UnsupportedForSimulation(f"torus rank must be between 1 and {MAX_R} with equal-length rows")
        if any(abs(x) > MAX_WEIGHT for row in rows for x in row):
            raise UnsupportedForSimulation(f"weights must be bounded by {MAX_WEIGHT}")

    @property
    def d(self) -> int:
        return len(self.weight_matrix)

    @property
    def r(self) -> int:
        return len(self.weight_matrix[0])

    def scales(self, t: Sequence[float]) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if t.shape != (self.r,) or np.any(t <= 0):
            raise ValueError(f"t must be {self.r} positive numbers")
        w = np.asarray(self.weight_matrix, dtype=float)
        return np.exp(w @ np.log(t))

    def scales_along(self, lam: Sequence, t: float) -> np.ndarray:
        """Scale of each coordinate at the point exp(log t * lam)."""
        pair = np.asarray(self.weight_matrix, dtype=float) @ np.asarray([float(x) for x in lam])
        return np.exp(math.log(t) * pair)


@dataclass(frozen=True)
class ProbeFunction:
    """exp(-pi sum (v_j / sigma_j)^2); sigma = None is the self-dual Gaussian."""

    sigma: tuple[float, ...] | None = None

    @classmethod
    def gaussian(cls) -> "ProbeFunction":
        return cls(None)

    @classmethod
    def scaled(cls, *sigma: float) -> "ProbeFunction":
        if any(s <= 0 for s in sigma):
            raise ValueError("scales must be positive")
        return cls(tuple(float(s) for s in sigma))

    def sigmas(self, d: int) -> np.ndarray:
        if self.sigma is None:
            return np.ones(d)
        if len(self.sigma) == 1:
            return np.full(d, self.sigma[0])
        if len(self.sigma) != d:
            raise ValueError(f"need {d} scales, got {len(self.sigma)}")
        return np.asarray(self.sigma)

    def __call__(self, v: Sequence[float]) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.exp(-math.pi * np.sum((v / self.sigmas(len(v))) ** 2)))

    def fourier(self, xi: Sequence[float]) -> float:
        xi = np.asarray(xi, dtype=float)
        s = self.sigmas(len(xi))
        return float(np.prod(s) * np.exp(-math.pi * np.sum((s * xi) ** 2)))


# theta sums ------------------------------------------------------------------------------


def tail_bound(a: float, radius: int) -> float:
    """Bound on 2 * sum_{n > radius} exp(-pi a n^2)."""
    q = math.exp(-math.pi * a * (2 * radius + 3))
    return 2.0 * math.exp(-math.pi * a * (radius + 1) ** 2) / (1.0 - q) if q < 1 else math.inf


def radius_for(a: float, tol: float = TAIL_TOL) -> int:
    r = max(0, int(math.ceil(math.sqrt(max(0.0, math.log(2.0 / tol)) / (math.pi * a)))) - 1)
    while tail_bound(a, r) > tol:
        r += 1
        if r > MAX_RADIUS:
            raise LatticeOverflow(f"scale {math.sqrt(a):.3g} needs a summation radius above {MAX_RADIUS}")
    if r > MAX_RADIUS:
        raise LatticeOverflow(f"scale {math.sqrt(a):.3g} needs a summation radius above {MAX_RADIUS}")
    return r


def theta(a: float, radius: int | None = None) -> tuple[float, float]:
    """sum_n exp(-pi a n^2) and the certified bound on what was left out."""
    if radius is None:
        radius = radius_for(a)
    n = np.arange(1, radius + 1, dtype=float)
    terms = np.exp(-math.pi * a * n * n)
    return 1.0 + 2.0 * math.fsum(terms[::-1]), tail_bound(a, radius)


def _check_scales(s: np.ndarray) -> None:
    if np.any(s > MAX_SCALE) or np.any(s < 1.0 / MAX_SCALE):
        raise LatticeOverflow(f"coordinate scale {s.max():.3g}/{s.min():.3g} outside [1e-12, 1e12]")


def _sum_at_scales(s: np.ndarray, f: ProbeFunction, radius: int | None = None) -> tuple[float, float]:
    _check_scales(s)
    a = (s / f.sigmas(len(s))) ** 2
    val, err = 1.0, 0.0
    for aj in a:
        th, tb = theta(float(aj), radius)
        err = err * (th + tb) + val * tb
        val *= th
    return val, err


def lattice_sum(action: TorusAction, f: ProbeFunction, t: Sequence[float], radius: int | None = None) -> float:
    """sum over gamma in Z^d of f(gamma . t)."""
    return _sum_at_scales(action.scales(t), f, radius)[0]


def lattice_sum_with_bound(action: TorusAction, f: ProbeFunction, t: Sequence[float], radius: int | None = None):
    return _sum_at_scales(action.scales(t), f, radius)


def poisson_identity_check(action: TorusAction, f: ProbeFunction, t: Sequence[float]) -> float:
    s = action.scales(t)
    _check_scales(s)
    direct = _sum_at_scales(s, f)[0]
    sig = f.sigmas(len(s))
    dual = 1.0
    for sj, gj in zip(s, sig):
        # (1/s) sum_k fhat(k/s) with fhat(xi) = sigma exp(-pi sigma^2 xi^2)
        th, _ = theta(float((gj / sj) ** 2))
        dual *= float(gj / sj) * th
    return float(abs(direct - dual))


# exponent fits -------------------------------------------------------------------------------


def geometric_grid(t_min: float, t_max: float, points: int) -> np.ndarray:
    return np.geomspace(t_min, t_max, points)


@dataclass(frozen=True, eq=False)
class LatticeSumProbe:
    action: TorusAction
    f: ProbeFunction
    direction: tuple
    t_grid: np.ndarray = field(default_factory=lambda: geometric_grid(1e-3, 1e-1, 9))

    def sum_at(self, t: float) -> float:
        return _sum_at_scales(self.action.scales_along(self.direction, t), self.f)[0]


def fit_exponent(probe: LatticeSumProbe) -> float:
    grid = np.asarray(probe.t_grid, dtype=float)
    if grid.size < 8 or np.any(grid <= 0):
        raise GridTooShort(f"need at least 8 positive grid points, got {grid.size}")
    if math.log10(grid.max() / grid.min()) < 2 - 1e-12:
        raise GridTooShort("grid must span at least two decades")
    vals = np.array([probe.sum_at(float(t)) for t in grid])
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise LatticeOverflow("non-finite lattice sum on the grid")
    x = np.log(grid)
    y = np.log(vals)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def _coordinate_signs(action: TorusAction, c: Cone, lam) -> list[Sign]:
    lam = tuple(Fraction(x) for x in lam)
    if len(lam) != action.r or not c.in_relint(lam) or all(x == 0 for x in lam):
        raise OutsideRelint(f"direction {[str(x) for x in lam]} is not in the relative interior of {c!r}")
    out = []
    for row in action.weight_matrix:
        s = relint_sign(row, c)
        if s is Sign.MIXED:
            raise OutsideRelint(f"weight {row} changes sign on {c!r}")
        out.append(s)
    return out


def _theta_mp(a, eps):
    """High-precision sum_n exp(-pi a n^2), truncated once terms drop below eps."""
    q = mpmath.exp(-mpmath.pi * a)
    total = mpmath.mpf(1)
    term = mpmath.mpf(1)
    ratio = q  # q^(2n+1)
    q2 = q * q
    n = 0
    while True:
        term *= ratio
        ratio *= q2
        n += 1
        total += 2 * term
        if term < eps:
            return total
        if n > MAX_RADIUS:
            raise LatticeOverflow("high-precision theta sum needs too many terms")


def residual_check(probe: LatticeSumProbe, c: Cone, lam: Sequence | None = None) -> float:
    """max over the grid of |S - f_C| * t^-(<chi_C, lam> + 10).

    f_C sums over the coordinates that are constant along the cone, integrates
    the ones that shrink and freezes the ones that grow at zero.  Both sides
    are evaluated with mpmath at a working precision that survives the t^-10
    rescaling.
    """
    lam = probe.direction if lam is None else tuple(lam)
    signs = _coordinate_signs(probe.action, c, lam)
    grid = np.asarray(probe.t_grid, dtype=float)
    pair = [sum(Fraction(w) * Fraction(x) for w, x in zip(row, lam)) for row in probe.action.weight_matrix]
    chi_lam = -sum(p for p, s in zip(pair, signs) if s is Sign.POSITIVE)
    sig = probe.f.sigmas(probe.action.d)
    expo = float(chi_lam) + 10.0
    dps = int(10 * math.log10(1.0 / grid.min()) + 30 + abs(expo) * math.log10(1.0 / grid.min()))
    worst = 0.0
    with mpmath.workdps(dps):
        eps = mpmath.mpf(10) ** (-dps)
        for t in grid:
            tm = mpmath.mpf(float(t))
            s_val = mpmath.mpf(1)
            f_val = mpmath.mpf(1)
            for p, sg, sj in zip(pair, signs, sig):
                s = mpmath.power(tm, mpmath.mpf(p.numerator) / p.denominator)
                if s > MAX_SCALE or s < 1 / mpmath.mpf(MAX_SCALE):
                    raise LatticeOverflow(f"coordinate scale {float(s):.3g} outside [1e-12, 1e12]")
                th = _theta_mp((s / sj) ** 2, eps)
                s_val *= th
                if sg is Sign.ZERO:
                    f_val *= th
                elif sg is Sign.POSITIVE:
                    f_val *= sj / s
            r = abs(s_val - f_val) * mpmath.power(tm, -expo)
            worst = max(worst, float(r))
    return worst


# regularized Mellin integrals --------------------------------------------------------------------

LOG_LO, LOG_HI = math.log(1e-8), math.log(1e8)
QUAD_TOL = 1e-9


@dataclass(frozen=True)
class AsymFun1D:
    """g on (0, inf) with g ~ c0 t^a0 at 0 and g ~ c_inf t^a_inf at infinity."""

    core: Callable[[float], float]
    a0: float = 0.0
    c0: float = 0.0
    a_inf: float = 0.0
    c_inf: float = 0.0
    name: str = "g"

    @property
    def critical(self) -> bool:
        return (self.c0 != 0 and self.a0 == 0) or (self.c_inf != 0 and self.a_inf == 0)

    def dilate(self, u: float) -> "AsymFun1D":
        """t -> g(u t), with the asymptotic coefficients transformed to match."""
        core = self.core
        return AsymFun1D(
            lambda t: core(u * t),
            self.a0,
            self.c0 * u**self.a0,
            self.a_inf,
            self.c_inf * u**self.a_inf,
            f"{self.name}(u={u})",
        )


def _quad(fn, lo, hi, pieces=8):
    total, err = 0.0, 0.0
    edges = np.linspace(lo, hi, pieces + 1)
    parts = []
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(fn, a, b, epsabs=1e-12, epsrel=1e-12, limit=200)
        parts.append(val)
        err += e
    total = math.fsum(parts)
    if not math.isfinite(total) or err > QUAD_TOL:
        raise QuadratureFailure(f"quadrature error estimate {err:.3g} exceeds {QUAD_TOL}")
    return total


def mellin_regularize(g: AsymFun1D) -> float:
    if g.critical:
        raise CriticalExponent(f"{g.name}: an asymptotic term with exponent 0 makes the integral diverge logarithmically")

    def near0(u):
        t = math.exp(u)
        return g.core(t) - (g.c0 * t**g.a0 if g.c0 else 0.0)

    def nearinf(u):
        t = math.exp(u)
        return g.core(t) - (g.c_inf * t**g.a_inf if g.c_inf else 0.0)

    total = _quad(near0, LOG_LO, 0.0) + _quad(nearinf, 0.0, LOG_HI)
    if g.c0:
        total += g.c0 / g.a0
    if g.c_inf:
        total -= g.c_inf / g.a_inf
    return total


def plain_integral(g: AsymFun1D) -> float:
    """int_0^inf g dt/t by direct quadrature; meaningful only when it converges."""
    return _quad(lambda u: g.core(math.exp(u)), LOG_LO, LOG_HI, pieces=16)


def invariance_check(g: AsymFun1D, u: float) -> float:
    if u <= 0:
        raise ValueError("u must be positive")
    return abs(mellin_regularize(g.dilate(u)) - mellin_regularize(g))


def _cutoff(t: float) -> float:
    """exp(-t e^(-1/t)): 1 up to rapid decay at 0, rapid decay at infinity."""
    return math.exp(-t * math.exp(-1.0 / t))


def _one_minus_cutoff(t: float) -> float:
    return -math.expm1(-t * math.exp(-1.0 / t))


BUILTINS: dict[str, AsymFun1D] = {
    "t_exp": AsymFun1D(lambda t: t * math.exp(-t), a0=1.0, c0=1.0, name="t_exp"),
    "bessel": AsymFun1D(lambda t: math.exp(-t - 1.0 / t), name="bessel"),
    "exp": AsymFun1D(lambda t: math.exp(-t), a0=0.0, c0=1.0, name="exp"),
    "sqrt_cut": AsymFun1D(lambda t: math.sqrt(t) * _cutoff(t), a0=0.5, c0=1.0, name="sqrt_cut"),
    "two_ended": AsymFun1D(
        lambda t: math.sqrt(t) * _cutoff(t) + _one_minus_cutoff(t) / t,
        a0=0.5,
        c0=1.0,
        a_inf=-1.0,
        c_inf=1.0,
        name="two_ended",
    ),
}
