"""Root data of split classical groups and tori in epsilon coordinates.

Each factor owns a block of coordinates in the cocharacter space.  GL_n
contributes n coordinates, SO_{2m+1}, Sp_{2m} and SO_{2m} contribute m,
a rank-r torus contributes r.  Positive roots are chosen so that the
anti-dominant chamber reads e_1 <= e_2 <= ... in every block.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import DimensionTooLarge, InvalidGroupSpec, UnsupportedGroup
from .exactgeom import Cone
from .exactgeom import linalg as la
from .exactgeom.cone import max_rank

FAMILIES = ("GL", "SO_odd", "SO_even", "Sp", "Torus")


@dataclass(frozen=True)
class GroupSpec:
    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        facs = tuple((str(f), r) for f, r in self.factors)
        object.__setattr__(self, "factors", facs)
        if not facs:
            raise InvalidGroupSpec("group needs at least one factor")
        for i, (fam, rank) in enumerate(facs):
            if fam not in FAMILIES:
                raise UnsupportedGroup(f"factor {i}: unsupported family {fam!r}; use one of {FAMILIES}")
            if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
                raise InvalidGroupSpec(f"factor {i}: rank must be a positive integer, got {rank!r}")
            if fam == "SO_even" and rank < 3:
                raise InvalidGroupSpec(f"factor {i}: SO_even needs rank >= 3 (got {rank})")
        cap = max_rank()
        if self.dim_a > cap:
            raise DimensionTooLarge(f"ambient dimension {self.dim_a} exceeds cap {cap} (CRITFAN_MAX_RANK)")

    @classmethod
    def of(cls, *factors: tuple[str, int]) -> "GroupSpec":
        return cls(tuple(factors))

    @property
    def dim_a(self) -> int:
        return sum(r for _, r in self.factors)


def _unit(i, n, s=1):
    v = [0] * n
    v[i] = s
    return v


def _add(*vs):
    return tuple(sum(c) for c in zip(*vs))


def _factor_roots(fam: str, m: int, off: int, n: int):
    """(simple roots, positive roots) of one factor, embedded in the full space."""
    e = lambda i, s=1: _unit(off + i, n, s)  # noqa: E731
    simple, pos = [], []
    if fam == "Torus":
        return simple, pos
    for i in range(m - 1):
        simple.append(_add(e(i), e(i + 1, -1)))
    for i in range(m):
        for j in range(i + 1, m):
            pos.append(_add(e(i), e(j, -1)))
            if fam != "GL":
                pos.append(_add(e(i), e(j)))
    if fam == "SO_odd":
        simple.append(tuple(e(m - 1)))
        pos.extend(tuple(e(i)) for i in range(m))
    elif fam == "Sp":
        simple.append(tuple(e(m - 1, 2)))
        pos.extend(tuple(e(i, 2)) for i in range(m))
    elif fam == "SO_even":
        simple.append(_add(e(m - 2), e(m - 1)))
    return simple, pos


class SplitKind(str, Enum):
    MEETS_CENTER = "MeetsCenter"
    FACTOR_SUM = "FactorSum"
    NEITHER = "Neither"


@dataclass(frozen=True)
class SplitVerdict:
    kind: SplitKind
    factors: frozenset[int] = frozenset()


@dataclass(frozen=True, eq=False)
class RootDatum:
    spec: GroupSpec
    dim_a: int
    offsets: tuple[int, ...]
    simple_roots: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]
    two_rho: tuple[int, ...]
    antidominant: Cone
    center: tuple[tuple[int, ...], ...]
    simple_factor_spans: tuple[tuple[tuple[int, ...], ...], ...]
    span_factor: tuple[int, ...] = field(default=())  # group factor owning each span

    @property
    def roots(self) -> tuple[tuple[int, ...], ...]:
        return self.positive_roots + tuple(tuple(-x for x in a) for a in self.positive_roots)

    def block(self, i: int) -> range:
        return range(self.offsets[i], self.offsets[i] + self.spec.factors[i][1])


def build_root_datum(g: GroupSpec) -> RootDatum:
    n = g.dim_a
    simple, pos, center, spans, owners, offsets = [], [], [], [], [], []
    off = 0
    for idx, (fam, m) in enumerate(g.factors):
        offsets.append(off)
        s, p = _factor_roots(fam, m, off, n)
        simple += s
        pos += p
        if fam == "Torus":
            center += [tuple(_unit(off + i, n)) for i in range(m)]
        elif fam == "GL":
            center.append(tuple(1 if off <= j < off + m else 0 for j in range(n)))
            if m > 1:
                spans.append(la.canonical_basis(s, n))
                owners.append(idx)
        else:
            spans.append(la.canonical_basis([_unit(off + i, n) for i in range(m)], n))
            owners.append(idx)
        off += m
    two_rho = tuple(sum(a[j] for a in pos) for j in range(n))
    anti = Cone.from_h([tuple(-x for x in a) for a in simple], (), n) if simple else Cone.whole(n)
    return RootDatum(
        spec=g,
        dim_a=n,
        offsets=tuple(offsets),
        simple_roots=tuple(simple),
        positive_roots=tuple(pos),
        two_rho=two_rho,
        antidominant=anti,
        center=la.canonical_basis(center, n) if center else (),
        simple_factor_spans=tuple(spans),
        span_factor=tuple(owners),
    )


def modular_character(rd: RootDatum) -> tuple[int, ...]:
    return rd.two_rho


def simple_factor_split(rd: RootDatum, subspace: Iterable[Sequence]) -> SplitVerdict:
    sub = [tuple(v) for v in subspace]
    n = rd.dim_a
    if rd.center and sub and la.subspace_intersection_dim(sub, rd.center, n) > 0:
        return SplitVerdict(SplitKind.MEETS_CENTER)
    inside = [i for i, sp in enumerate(rd.simple_factor_spans) if all(la.in_span(v, sub, n) for v in sp)] if sub else []
    covered = sum(len(rd.simple_factor_spans[i]) for i in inside)
    if covered == la.rank(sub, n):
        return SplitVerdict(SplitKind.FACTOR_SUM, frozenset(inside))
    return SplitVerdict(SplitKind.NEITHER)
