"""Representation expressions and their weight multisets."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence, Union

from .errors import InvalidRepresentation, MixedSign
from .exactgeom import Cone, Sign, relint_sign
from .exactgeom import linalg as la
from .rootdata import RootDatum, SplitKind, _factor_roots, simple_factor_split

Functional = tuple  # of Fraction


# expression tree -----------------------------------------------------------------


@dataclass(frozen=True)
class Std:
    factor: int = 0


@dataclass(frozen=True)
class Adjoint:
    factor: int = 0


@dataclass(frozen=True)
class Dual:
    child: "RepExpr"


@dataclass(frozen=True)
class Sum:
    children: tuple["RepExpr", ...]

    def __init__(self, *children):
        if len(children) == 1 and isinstance(children[0], (list, tuple)):
            children = tuple(children[0])
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class Mult:
    child: "RepExpr"
    n: int


@dataclass(frozen=True)
class DirectWeights:
    """Explicit weights on the full cocharacter space, each with a multiplicity."""

    entries: tuple[tuple[tuple, int], ...]

    def __init__(self, entries: Iterable):
        norm = []
        for e in entries:
            if len(e) == 2 and isinstance(e[1], int) and isinstance(e[0], (list, tuple)):
                vec, mult = e
            else:
                vec, mult = e, 1
            norm.append((la.frac_vector(vec), mult))
        object.__setattr__(self, "entries", tuple(norm))


RepExpr = Union[Std, Adjoint, Dual, Sum, Mult, DirectWeights]


# weight multisets -------------------------------------------------------------------


@dataclass(frozen=True)
class WeightMultiset:
    entries: tuple[tuple[Functional, int], ...]

    @classmethod
    def from_counts(cls, counts) -> "WeightMultiset":
        items = sorted((la.frac_vector(k), v) for k, v in counts.items() if v)
        for _, v in items:
            if v < 0:
                raise InvalidRepresentation("negative multiplicity")
        return cls(tuple(items))

    @property
    def dim(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def ambient(self) -> int | None:
        return len(self.entries[0][0]) if self.entries else None

    def counts(self) -> Counter:
        return Counter({w: m for w, m in self.entries})

    def support(self) -> list[Functional]:
        return [w for w, _ in self.entries]

    def nonzero(self) -> list[Functional]:
        return [w for w, _ in self.entries if not la.is_zero(w)]

    def __add__(self, other: "WeightMultiset") -> "WeightMultiset":
        return WeightMultiset.from_counts(self.counts() + other.counts())

    def times(self, n: int) -> "WeightMultiset":
        return WeightMultiset.from_counts({w: m * n for w, m in self.entries})

    def dual(self) -> "WeightMultiset":
        return WeightMultiset.from_counts({tuple(-x for x in w): m for w, m in self.entries})

    @cached_property
    def scaled(self) -> tuple[int, tuple[tuple[tuple[int, ...], int], ...]]:
        """Common denominator D and the entries as integer vectors w * D."""
        den = 1
        for w, _ in self.entries:
            for x in w:
                den = den * x.denominator // gcd(den, x.denominator)
        return den, tuple((tuple(int(x * den) for x in w), m) for w, m in self.entries)

    def is_self_dual(self) -> bool:
        return self == self.dual()


def _std_weights(rd: RootDatum, i: int) -> Counter:
    fam, m = rd.spec.factors[i]
    off, n = rd.offsets[i], rd.dim_a
    out: Counter = Counter()

    def e(j, s=1):
        v = [Fraction(0)] * n
        v[off + j] = Fraction(s)
        return tuple(v)

    for j in range(m):
        out[e(j)] += 1
        if fam in ("SO_odd", "SO_even", "Sp"):
            out[e(j, -1)] += 1
    if fam == "SO_odd":
        out[tuple(Fraction(0) for _ in range(n))] += 1
    return out


def _adjoint_weights(rd: RootDatum, i: int) -> Counter:
    fam, m = rd.spec.factors[i]
    n = rd.dim_a
    _, pos = _factor_roots(fam, m, rd.offsets[i], n)
    out: Counter = Counter()
    for a in pos:
        out[la.frac_vector(a)] += 1
        out[la.frac_vector(tuple(-x for x in a))] += 1
    out[tuple(Fraction(0) for _ in range(n))] += m
    return out


def weights_of(e: RepExpr, rd: RootDatum) -> WeightMultiset:
    return WeightMultiset.from_counts(_weights(e, rd))


def _check_factor(i, rd):
    if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < len(rd.spec.factors):
        raise InvalidRepresentation(f"factor index {i!r} out of range for {len(rd.spec.factors)} factors")


def _weights(e, rd: RootDatum) -> Counter:
    if isinstance(e, Std):
        _check_factor(e.factor, rd)
        return _std_weights(rd, e.factor)
    if isinstance(e, Adjoint):
        _check_factor(e.factor, rd)
        return _adjoint_weights(rd, e.factor)
    if isinstance(e, Dual):
        return Counter({tuple(-x for x in w): m for w, m in _weights(e.child, rd).items()})
    if isinstance(e, Sum):
        if not e.children:
            raise InvalidRepresentation("empty sum")
        total: Counter = Counter()
        for c in e.children:
            total.update(_weights(c, rd))
        return total
    if isinstance(e, Mult):
        if isinstance(e.n, bool) or not isinstance(e.n, int) or e.n < 1:
            raise InvalidRepresentation(f"multiplicity must be a positive integer, got {e.n!r}")
        return Counter({w: m * e.n for w, m in _weights(e.child, rd).items()})
    if isinstance(e, DirectWeights):
        out: Counter = Counter()
        for w, m in e.entries:
            if len(w) != rd.dim_a:
                raise InvalidRepresentation(f"weight {w} has length {len(w)}, expected {rd.dim_a}")
            if isinstance(m, bool) or not isinstance(m, int) or m < 1:
                raise InvalidRepresentation(f"weight multiplicity must be a positive integer, got {m!r}")
            out[w] += m
        return out
    raise InvalidRepresentation(f"unknown representation node {e!r}")


def haar_character(w: WeightMultiset, n: int | None = None) -> Functional:
    n = w.ambient if n is None else n
    return tuple(sum((v[j] * m for v, m in w.entries), Fraction(0)) for j in range(n))


# kernel splitting -----------------------------------------------------------------------


class KernelVerdict(str, Enum):
    CENTRAL_TRIVIAL = "CentralTrivial"
    CLEAN = "Clean"
    IRREGULAR = "Irregular"


@dataclass(frozen=True)
class KernelSplit:
    a0: tuple[tuple[int, ...], ...]
    verdict: KernelVerdict
    a_prime: tuple[tuple[int, ...], ...] = ()
    kernel_factors: frozenset[int] = frozenset()


def action_kernel(w: WeightMultiset, rd: RootDatum) -> KernelSplit:
    n = rd.dim_a
    nz = w.nonzero()
    a0 = la.canonical_basis(la.nullspace(nz, n), n) if n else ()
    if not nz:
        a0 = la.canonical_basis([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)
    if not a0:
        whole = la.canonical_basis([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)
        return KernelSplit((), KernelVerdict.CLEAN, whole)
    v = simple_factor_split(rd, a0)
    if v.kind is SplitKind.MEETS_CENTER:
        return KernelSplit(a0, KernelVerdict.CENTRAL_TRIVIAL)
    if v.kind is SplitKind.FACTOR_SUM:
        keep = list(rd.center)
        for i, sp in enumerate(rd.simple_factor_spans):
            if i not in v.factors:
                keep += list(sp)
        return KernelSplit(a0, KernelVerdict.CLEAN, la.canonical_basis(keep, n) if keep else (), v.factors)
    return KernelSplit(a0, KernelVerdict.IRREGULAR)


# partition by sign ---------------------------------------------------------------------


@dataclass(frozen=True)
class WeightPartition:
    neg: WeightMultiset
    zero: WeightMultiset
    pos: WeightMultiset


def _int_sign(v, c: Cone) -> Sign:
    if any(sum(x * y for x, y in zip(v, l)) for l in c.lineality):
        return Sign.MIXED
    pos = neg = False
    for r in c.rays:
        t = sum(x * y for x, y in zip(v, r))
        if t > 0:
            pos = True
        elif t < 0:
            neg = True
    if pos and neg:
        return Sign.MIXED
    return Sign.POSITIVE if pos else Sign.NEGATIVE if neg else Sign.ZERO


def weight_partition(w: WeightMultiset, c: Cone) -> WeightPartition:
    groups: dict[Sign, Counter] = {Sign.NEGATIVE: Counter(), Sign.ZERO: Counter(), Sign.POSITIVE: Counter()}
    for (v, m), (iv, _) in zip(w.entries, w.scaled[1]):
        s = _int_sign(iv, c)
        if s is Sign.MIXED:
            raise MixedSign(f"weight {tuple(str(x) for x in v)} changes sign on {c!r}")
        groups[s][v] += m
    return WeightPartition(
        WeightMultiset.from_counts(groups[Sign.NEGATIVE]),
        WeightMultiset.from_counts(groups[Sign.ZERO]),
        WeightMultiset.from_counts(groups[Sign.POSITIVE]),
    )


def positive_weights(w: WeightMultiset, c: Cone) -> Sequence[tuple[Functional, int]]:
    return weight_partition(w, c).pos.entries
