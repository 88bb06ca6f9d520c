"""Fans of pointed rational cones: construction, validation, quotients."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from ..errors import DimensionMismatch, NotInFan, OutsideSupport, PointednessViolation
from . import linalg as la
from .cone import Cone, Sign, _idot, faces, relint_sign


def simplicial_faces(c: Cone) -> list[Cone]:
    """Faces of a simplicial cone are exactly the subsets of its rays."""
    out = []
    rays = c.rays
    for k in range(len(rays) + 1):
        for sub in combinations(rays, k):
            out.append(Cone(c.ambient, tuple(sub), ()))
    return out


def _all_faces(c: Cone) -> list[Cone]:
    return simplicial_faces(c) if c.is_simplicial else faces(c)


@dataclass(frozen=True, eq=False)
class Fan:
    """A finite set of pointed cones, closed under faces, with a stated support."""

    ambient: int
    cones: tuple[Cone, ...]
    support: Cone

    @classmethod
    def from_maximal(cls, maximal: Iterable[Cone], support: Cone | None = None) -> "Fan":
        maximal = list(maximal)
        if not maximal:
            raise ValueError("a fan needs at least one cone")
        n = maximal[0].ambient
        seen: dict[tuple, Cone] = {}
        for m in maximal:
            if m.ambient != n:
                raise DimensionMismatch("cones live in different spaces")
            m.require_pointed()
            for f in _all_faces(m):
                seen.setdefault(f.rays, f)
        cones = tuple(sorted(seen.values(), key=lambda c: (c.dim, c.rays)))
        if support is None:
            support = Cone.from_rays([r for m in maximal for r in m.rays], n)
        return cls(n, cones, support)

    # lookups ----------------------------------------------------------------
    @cached_property
    def _by_rays(self) -> dict[tuple, Cone]:
        return {c.rays: c for c in self.cones}

    @cached_property
    def rays(self) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(c.rays[0] for c in self.cones if len(c.rays) == 1 and c.dim == 1))

    @cached_property
    def _ray_pos(self) -> dict:
        return {r: i for i, r in enumerate(self.rays)}

    def ray_index(self, r) -> int:
        try:
            return self._ray_pos[tuple(r)]
        except KeyError:
            raise NotInFan(f"{tuple(r)} is not a ray of the fan") from None

    def __contains__(self, c: Cone) -> bool:
        return self._by_rays.get(c.rays) == c

    def get(self, rays: Iterable[Sequence[int]]) -> Cone:
        key = tuple(sorted(tuple(r) for r in rays))
        try:
            return self._by_rays[key]
        except KeyError:
            raise NotInFan(f"no cone with rays {list(key)}") from None

    def index(self, c: Cone) -> int:
        if c not in self:
            raise NotInFan(repr(c))
        return self.cones.index(c)

    @cached_property
    def maximal_cones(self) -> tuple[Cone, ...]:
        sets = [(c, frozenset(c.rays)) for c in self.cones]
        out = []
        for c, s in sets:
            if not any(s < t for _, t in sets):
                out.append(c)
        return tuple(out)

    def cones_of_dim(self, k: int) -> tuple[Cone, ...]:
        return tuple(c for c in self.cones if c.dim == k)

    def faces_of(self, c: Cone) -> list[Cone]:
        s = set(c.rays)
        return [d for d in self.cones if set(d.rays) <= s]

    def cones_containing(self, d: Cone) -> list[Cone]:
        s = set(d.rays)
        return [c for c in self.cones if s <= set(c.rays)]

    @cached_property
    def ray_masks(self) -> tuple[int, ...]:
        """Bitmask over ``self.rays`` for every cone, aligned with ``self.cones``."""
        idx = self._ray_pos
        return tuple(sum(1 << idx[r] for r in c.rays) for c in self.cones)

    def face_pairs(self):
        """All pairs (C1, C2) with C1 a face of C2 (including C1 == C2)."""
        masks = self.ray_masks
        for j, c2 in enumerate(self.cones):
            m2 = masks[j]
            for i, c1 in enumerate(self.cones):
                if masks[i] & m2 == masks[i]:
                    yield c1, c2

    def locate(self, point: Sequence) -> Cone:
        """The unique cone whose relative interior contains ``point``."""
        if len(point) != self.ambient:
            raise DimensionMismatch(f"point of length {len(point)} in ambient {self.ambient}")
        if la.is_zero(point):
            return self.get(())
        for m in self.maximal_cones:
            if m.contains(point):
                tight = [h for h in m.ineqs if la.dot(h, point) == 0]
                rays = [r for r in m.rays if all(_idot(h, r) == 0 for h in tight)]
                return self.get(rays)
        raise OutsideSupport(f"{list(point)} is not in the support of the fan")


def _normalize_hyperplanes(hyps: Iterable[Sequence], n: int) -> list[tuple[int, ...]]:
    out: dict[tuple, tuple] = {}
    for h in hyps:
        if len(h) != n:
            raise DimensionMismatch(f"hyperplane of length {len(h)} in ambient {n}")
        p = la.primitive(h)
        if la.is_zero(p):
            continue
        neg = tuple(-x for x in p)
        key = max(p, neg)
        out.setdefault(key, key)
    return sorted(out)


def fan_from_hyperplanes(base: Cone, hyps: Iterable[Sequence]) -> Fan:
    """Split ``base`` by every hyperplane in turn and close under faces.

    Every resulting piece must be pointed; otherwise the hyperplanes do not
    cut the lineality of the base down to zero.
    """
    pieces = [base]
    for h in _normalize_hyperplanes(hyps, base.ambient):
        nxt = []
        for p in pieces:
            if relint_sign(h, p) is Sign.MIXED:
                nh = tuple(-x for x in h)
                nxt.append(Cone.from_h(p.ineqs + (h,), p.eqs, p.ambient))
                nxt.append(Cone.from_h(p.ineqs + (nh,), p.eqs, p.ambient))
            else:
                nxt.append(p)
        pieces = nxt
    for p in pieces:
        if not p.is_pointed:
            raise PointednessViolation(
                f"piece {p!r} keeps a lineality space; the hyperplanes do not cut the base to pointed cones"
            )
    return Fan.from_maximal(pieces, base)


# validation -----------------------------------------------------------------


def _sign_masks(g, rays) -> tuple[int, int, int]:
    pos = neg = zero = 0
    for i, r in enumerate(rays):
        v = _idot(g, r)
        if v > 0:
            pos |= 1 << i
        elif v < 0:
            neg |= 1 << i
        else:
            zero |= 1 << i
    return pos, neg, zero


def _meet_is_common_face(m1: Cone, m2: Cone, gidx, cache) -> bool:
    """Exact test that m1 & m2 is a face of both.

    Successively cuts both cones by functionals that are >= 0 on the first and
    <= 0 on the second (taken from their facet normals); if the two cut faces
    coincide, their common value is the intersection and a face of each.
    Falls back to a direct double-description intersection otherwise.
    """
    rays = cache["rays"]

    def masks(g):
        if g not in cache:
            cache[g] = _sign_masks(g, rays)
        return cache[g]

    a = sum(1 << gidx[r] for r in m1.rays)
    b = sum(1 << gidx[r] for r in m2.rays)
    pool = [(g, 1) for g in m1.ineqs] + [(g, -1) for g in m2.ineqs]
    progress = True
    while a != b and progress:
        progress = False
        for g, sgn in pool:
            pos, neg, zero = masks(g)
            if sgn < 0:
                pos, neg = neg, pos
            if a & neg == 0 and b & pos == 0 and ((a | b) & ~zero):
                a &= zero
                b &= zero
                progress = True
                if a == b:
                    break
    if a == b:
        return True
    meet = m1.intersect(m2)
    return meet.is_pointed and meet.is_face_of(m1) and meet.is_face_of(m2)


def is_valid_fan(f: Fan) -> list[str]:
    """Diagnostics for every violated fan invariant; empty when the fan is valid."""
    diags: list[str] = []
    for c in f.cones:
        if c.ambient != f.ambient:
            diags.append(f"cone {c!r} lives in dimension {c.ambient}, fan in {f.ambient}")
        if not c.is_pointed:
            diags.append(f"cone {c!r} is not pointed")
    if diags:
        return diags
    present = {c.rays for c in f.cones}
    for c in f.cones:
        for d in _all_faces(c):
            if d.rays not in present:
                diags.append(f"not face-closed: face {d!r} of {c!r} missing")
    maximal = f.maximal_cones
    all_rays = sorted({r for c in f.cones for r in c.rays})
    gidx = {r: i for i, r in enumerate(all_rays)}
    cache: dict = {"rays": all_rays}
    for m1, m2 in combinations(maximal, 2):
        if not _meet_is_common_face(m1, m2, gidx, cache):
            diags.append(f"intersection not a common face: {m1!r} and {m2!r}")
    # support
    sup = f.support
    for m in maximal:
        if not sup.contains_cone(m):
            diags.append(f"cone {m!r} leaves the support")
        if m.dim != sup.dim:
            diags.append(f"maximal cone {m!r} has dimension {m.dim}, support has {sup.dim}")
    if diags:
        return diags
    d = sup.dim
    if d > 0:
        for c in f.cones:
            if c.dim != d - 1:
                continue
            s = set(c.rays)
            count = sum(1 for m in maximal if s <= set(m.rays))
            p = c.relint_point()
            expected = 2 if sup.in_relint(p) else 1
            if count != expected:
                diags.append(
                    f"support not covered near {c!r}: in {count} maximal cones, expected {expected}"
                )
        for r in sup.rays:
            try:
                f.locate(r)
            except OutsideSupport:
                diags.append(f"support ray {r} not covered")
    return diags


# quotients -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StarFan:
    """Fan of images of the cones containing ``base`` in the quotient by span(base)."""

    base: Cone
    fan: Fan
    source: dict = field(repr=False)  # quotient cone rays -> source cone in the original fan
    _red: tuple = field(repr=False)
    _pivots: tuple = field(repr=False)
    _keep: tuple = field(repr=False)

    def project(self, v: Sequence) -> tuple:
        red = la.reduce_mod(v, self._red, self._pivots)
        return tuple(red[i] for i in self._keep)

    def source_of(self, c: Cone) -> Cone:
        try:
            return self.source[c.rays]
        except KeyError:
            raise NotInFan(repr(c)) from None


def star_fan(f: Fan, d: Cone) -> StarFan:
    if d not in f:
        raise NotInFan(f"{d!r} is not a cone of the fan")
    n = f.ambient
    red, piv = la.rref(d.rays, n) if d.rays else ([], [])
    keep = tuple(i for i in range(n) if i not in piv)
    m = len(keep)

    def proj(v):
        r = la.reduce_mod(v, red, piv)
        return tuple(r[i] for i in keep)

    source: dict[tuple, Cone] = {}
    images = []
    for c in f.cones_containing(d):
        imgs = [proj(r) for r in c.rays]
        img = Cone.from_rays([v for v in imgs if not la.is_zero(v)], m)
        if not img.is_pointed:
            raise PointednessViolation(f"image of {c!r} in the quotient is not pointed")
        source[img.rays] = c
        images.append(img)
    top = max(x.dim for x in images)
    maximal = [x for x in images if x.dim == top] or images
    support_rays = [r for x in maximal for r in x.rays]
    support = Cone.from_rays(support_rays, m) if support_rays else Cone.zero(m)
    qfan = Fan.from_maximal(maximal, support)
    return StarFan(d, qfan, source, tuple(tuple(r) for r in red), tuple(piv), keep)
