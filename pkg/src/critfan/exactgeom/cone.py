"""Rational polyhedral cones with both H- and V-descriptions.

The single conversion routine is Motzkin's double description method, run
on primitive integer vectors so that every intermediate stays exact.
Canonical forms:

* rays: primitive integer generators (reduced modulo the lineality space),
  sorted lexicographically;
* lineality / equations: primitive multiples of reduced row echelon rows;
* inequalities: facet normals reduced modulo the equations, primitive, sorted.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

from ..errors import DimensionMismatch, DimensionTooLarge, PointednessViolation
from . import linalg as la

DEFAULT_MAX_RANK = 12


def max_rank() -> int:
    return int(os.environ.get("CRITFAN_MAX_RANK", DEFAULT_MAX_RANK))


def check_rank(n: int) -> None:
    cap = max_rank()
    if n > cap:
        raise DimensionTooLarge(f"ambient dimension {n} exceeds cap {cap} (CRITFAN_MAX_RANK)")


class Sign(str, Enum):
    POSITIVE = "Positive"
    ZERO = "Zero"
    NEGATIVE = "Negative"
    MIXED = "Mixed"


def _unit(i: int, n: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def _idot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def double_description(ineqs: Sequence[Sequence[int]], eqs: Sequence[Sequence[int]], n: int):
    """Generators of {x : a.x >= 0 (a in ineqs), b.x = 0 (b in eqs)}.

    Inputs must be integer vectors.  Returns ``(lineality, rays)``, both lists
    of primitive integer vectors; the rays are the extreme rays modulo the
    lineality space (not yet reduced to canonical form).
    """
    lin = [_unit(i, n) for i in range(n)]
    rays: list[tuple[tuple[int, ...], int]] = []
    constraints = [(tuple(b), True) for b in eqs] + [(tuple(a), False) for a in ineqs]
    bit = 0
    for a, is_eq in constraints:
        if la.is_zero(a):
            continue
        cur = 1 << bit
        prev_all = cur - 1
        lin_vals = [_idot(a, l) for l in lin]
        j = next((i for i, v in enumerate(lin_vals) if v != 0), None)
        if j is not None:
            l0 = lin.pop(j)
            c0 = lin_vals.pop(j)
            if c0 < 0:
                l0 = tuple(-x for x in l0)
                c0 = -c0
            lin = [
                la.int_primitive(tuple(c0 * x - v * y for x, y in zip(l, l0))) if v else l
                for l, v in zip(lin, lin_vals)
            ]
            new = []
            for r, mask in rays:
                v = _idot(a, r)
                if v:
                    r = la.int_primitive(tuple(c0 * x - v * y for x, y in zip(r, l0)))
                new.append((r, mask | cur))
            if not is_eq:
                new.append((l0, prev_all))
            rays = new
        else:
            vals = [_idot(a, r) for r, _ in rays]
            pos = [(r, m, v) for (r, m), v in zip(rays, vals) if v > 0]
            neg = [(r, m, v) for (r, m), v in zip(rays, vals) if v < 0]
            new = [(r, m | cur) for (r, m), v in zip(rays, vals) if v == 0]
            if not is_eq:
                new.extend((r, m) for r, m, _ in pos)
            masks = [m for _, m in rays]
            for p, mp, vp in pos:
                for q, mq, vq in neg:
                    common = mp & mq
                    # combinatorial adjacency test
                    hits = 0
                    for m in masks:
                        if m & common == common:
                            hits += 1
                            if hits > 2:
                                break
                    if hits > 2:
                        continue
                    vec = la.int_primitive(tuple(vp * y - vq * x for x, y in zip(p, q)))
                    new.append((vec, common | cur))
            rays = new
        bit += 1
    return lin, [r for r, _ in rays]


def _int_rows(rows: Iterable[Sequence], n: int) -> list[tuple[int, ...]]:
    out = []
    for r in rows:
        if len(r) != n:
            raise DimensionMismatch(f"expected length {n}, got {len(r)}")
        out.append(la.primitive(r))
    return out


def _canonical_v(lin, rays, n):
    lin_c = la.canonical_basis(lin, n) if lin else ()
    if lin_c:
        red, piv = la.rref(lin_c, n)
        rays = [la.reduce_mod(r, red, piv) for r in rays]
    out = set()
    for r in rays:
        if not la.is_zero(r):
            out.add(la.primitive(r))
    return tuple(sorted(out)), lin_c


@dataclass(frozen=True, eq=False)
class Cone:
    """A rational polyhedral cone in a fixed ambient coordinate space."""

    ambient: int
    rays: tuple[tuple[int, ...], ...]
    lineality: tuple[tuple[int, ...], ...] = ()

    # construction -------------------------------------------------------
    @classmethod
    def from_h(cls, ineqs: Iterable[Sequence] = (), eqs: Iterable[Sequence] = (), ambient: int | None = None) -> "Cone":
        ineqs = list(ineqs)
        eqs = list(eqs)
        n = la.common_length(ineqs + eqs, ambient)
        if n is None:
            raise DimensionMismatch("ambient dimension unknown: pass ambient= for an empty description")
        check_rank(n)
        lin, rays = double_description(_int_rows(ineqs, n), _int_rows(eqs, n), n)
        r, l = _canonical_v(lin, rays, n)
        return cls(n, r, l)

    @classmethod
    def from_rays(cls, rays: Iterable[Sequence], ambient: int | None = None, lineality: Iterable[Sequence] = ()) -> "Cone":
        rays = list(rays)
        lineality = list(lineality)
        n = la.common_length(rays + lineality, ambient)
        if n is None:
            raise DimensionMismatch("ambient dimension unknown: pass ambient= for an empty generator set")
        check_rank(n)
        # dual then primal: removes redundant generators
        dlin, drays = double_description(_int_rows(rays, n), _int_rows(lineality, n), n)
        lin, prays = double_description(drays, dlin, n)
        r, l = _canonical_v(lin, prays, n)
        return cls(n, r, l)

    @classmethod
    def zero(cls, n: int) -> "Cone":
        return cls(n, (), ())

    @classmethod
    def whole(cls, n: int) -> "Cone":
        return cls(n, (), la.canonical_basis([_unit(i, n) for i in range(n)], n))

    # identity -------------------------------------------------------------
    @property
    def key(self):
        return (self.ambient, self.rays, self.lineality)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if self.lineality:
            return f"Cone(rays={list(self.rays)}, lineality={list(self.lineality)})"
        return f"Cone(rays={list(self.rays)})"

    # H-description (lazy) ---------------------------------------------------
    @cached_property
    def _h(self):
        n = self.ambient
        dlin, drays = double_description(list(self.rays), list(self.lineality), n)
        eqs = la.canonical_basis(dlin, n) if dlin else ()
        if eqs:
            red, piv = la.rref(eqs, n)
            drays = [la.reduce_mod(r, red, piv) for r in drays]
        ineqs = tuple(sorted({la.primitive(r) for r in drays if not la.is_zero(r)}))
        return ineqs, eqs

    @property
    def ineqs(self) -> tuple[tuple[int, ...], ...]:
        return self._h[0]

    @property
    def eqs(self) -> tuple[tuple[int, ...], ...]:
        return self._h[1]

    # basic invariants -------------------------------------------------------
    @cached_property
    def dim(self) -> int:
        return la.int_rank(list(self.rays) + list(self.lineality))

    @property
    def lineality_dim(self) -> int:
        return len(self.lineality)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def is_simplicial(self) -> bool:
        return self.is_pointed and len(self.rays) == self.dim

    def require_pointed(self) -> "Cone":
        if self.lineality:
            raise PointednessViolation(f"cone has lineality dimension {self.lineality_dim}")
        return self

    def span_basis(self):
        return la.canonical_basis(list(self.rays) + list(self.lineality), self.ambient)

    # membership -------------------------------------------------------------
    def contains(self, point: Sequence) -> bool:
        if len(point) != self.ambient:
            raise DimensionMismatch(f"point of length {len(point)} in ambient {self.ambient}")
        return all(la.dot(e, point) == 0 for e in self.eqs) and all(la.dot(h, point) >= 0 for h in self.ineqs)

    def in_relint(self, point: Sequence) -> bool:
        if len(point) != self.ambient:
            raise DimensionMismatch(f"point of length {len(point)} in ambient {self.ambient}")
        return all(la.dot(e, point) == 0 for e in self.eqs) and all(la.dot(h, point) > 0 for h in self.ineqs)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(r) for r in other.rays) and all(
            self.contains(l) and self.contains(tuple(-x for x in l)) for l in other.lineality
        )

    def relint_point(self) -> tuple[int, ...]:
        """Sum of the ray generators; lies in the relative interior of a pointed cone."""
        n = self.ambient
        return tuple(sum(r[i] for r in self.rays) for i in range(n))

    def facet_ray_masks(self) -> list[int]:
        """Bitmask (over ``self.rays``) of rays lying on each facet."""
        out = []
        for h in self.ineqs:
            m = 0
            for i, r in enumerate(self.rays):
                if _idot(h, r) == 0:
                    m |= 1 << i
            out.append(m)
        return out

    def sub_cone(self, mask: int) -> "Cone":
        """Face spanned by the rays selected by ``mask`` (caller guarantees it is a face)."""
        return Cone(self.ambient, tuple(r for i, r in enumerate(self.rays) if mask >> i & 1), ())

    def intersect(self, other: "Cone") -> "Cone":
        if other.ambient != self.ambient:
            raise DimensionMismatch("cones live in different spaces")
        return Cone.from_h(self.ineqs + other.ineqs, self.eqs + other.eqs, self.ambient)

    def is_face_of(self, other: "Cone") -> bool:
        if not other.contains_cone(self):
            return False
        rs = set(self.rays)
        if not other.is_pointed:
            raise PointednessViolation("face test requires a pointed cone")
        if not rs:
            return True
        # smallest face of `other` containing self: rays tight on every facet tight on self
        tight = [h for h in other.ineqs if all(_idot(h, r) == 0 for r in self.rays)]
        face_rays = {r for r in other.rays if all(_idot(h, r) == 0 for h in tight)}
        return face_rays == rs and self.dim == la.int_rank(list(face_rays))


def dd_convert(ineqs: Iterable[Sequence], eqs: Iterable[Sequence] = (), ambient: int | None = None) -> Cone:
    """H-description to a cone carrying both descriptions in canonical form."""
    return Cone.from_h(ineqs, eqs, ambient)


def relint_sign(f: Sequence, c: Cone) -> Sign:
    if len(f) != c.ambient:
        raise DimensionMismatch(f"functional of length {len(f)} in ambient {c.ambient}")
    f = la.primitive_cached(tuple(f))  # positive rescaling keeps every sign
    if any(_idot(f, l) != 0 for l in c.lineality):
        return Sign.MIXED
    vals = [_idot(f, r) for r in c.rays]
    if all(v == 0 for v in vals):
        return Sign.ZERO
    if all(v >= 0 for v in vals):
        return Sign.POSITIVE
    if all(v <= 0 for v in vals):
        return Sign.NEGATIVE
    return Sign.MIXED


def faces(c: Cone) -> list[Cone]:
    """All faces of a pointed cone, from {0} up to ``c``, in canonical order."""
    c.require_pointed()
    full = (1 << len(c.rays)) - 1
    masks = c.facet_ray_masks()
    seen = {full}
    stack = [full]
    while stack:
        s = stack.pop()
        for m in masks:
            t = s & m
            if t != s and t not in seen:
                seen.add(t)
                stack.append(t)
    out = [c.sub_cone(m) for m in seen]
    out.sort(key=lambda x: (x.dim, x.rays))
    return out
