"""Face-labelled partition of a cone's cross-section.

The cross-section of a pointed cone ``c`` is the slice where the facet
normals (primitive, integer) sum to one.  A point ``v`` gets the label
``I(v) = {i : h_i(v) <= delta}``; for small ``delta`` every label that occurs
is the facet set of a nonzero face, and the regions sharing a label give a
partition indexed by faces.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ..errors import DeltaTooLarge, OutsideRelint
from . import linalg as la
from .cone import Cone, _idot, faces

MAX_HALVINGS = 20


@dataclass(frozen=True)
class LabeledRegion:
    """Points of ``cone`` whose near-facets (h_i <= delta on the slice) are exactly ``facets``."""

    cone: Cone
    face: Cone
    facets: frozenset[int]
    delta: Fraction

    def label_of(self, point: Sequence) -> frozenset[int]:
        return label(self.cone, point, self.delta)

    def contains(self, point: Sequence) -> bool:
        return self.label_of(point) == self.facets


def label(c: Cone, point: Sequence, delta) -> frozenset[int]:
    if not c.contains(point) or la.is_zero(point):
        raise OutsideRelint(f"{list(point)} is not a nonzero point of the cone")
    vals = [la.dot(h, point) for h in c.ineqs]
    s = sum(vals)
    delta = la.as_fraction(delta)
    return frozenset(i for i, v in enumerate(vals) if v <= delta * s)


def _face_labels(c: Cone) -> dict[frozenset[int], Cone]:
    out = {}
    for d in faces(c):
        if not d.rays:
            continue
        idx = frozenset(i for i, h in enumerate(c.ineqs) if all(_idot(h, r) == 0 for r in d.rays))
        out[idx] = d
    return out


def _realized(c: Cone, delta: Fraction) -> set[frozenset[int]]:
    """Labels attained by some point of the cross-section at this delta."""
    hs = c.ineqs
    k = len(hs)
    total = tuple(sum(h[j] for h in hs) for j in range(c.ambient))
    out = set()
    for size in range(k + 1):
        for sub in combinations(range(k), size):
            inside = set(sub)
            cons = list(hs)
            strict = []
            for i, h in enumerate(hs):
                g = tuple(delta * t - x for t, x in zip(total, h))
                if i in inside:
                    cons.append(g)
                else:
                    neg = tuple(-x for x in g)
                    cons.append(neg)
                    strict.append(neg)
            piece = Cone.from_h(cons, c.eqs, c.ambient)
            if not piece.rays:
                continue
            p = piece.relint_point()
            if all(la.dot(g, p) > 0 for g in strict):
                out.add(frozenset(sub))
    return out


def _is_good(c: Cone, delta: Fraction, good) -> bool:
    return _realized(c, delta) <= set(good)


def delta_max(c: Cone) -> Fraction:
    """Largest delta = 1/2^k (k <= 20) for which every attained label belongs to a face."""
    c.require_pointed()
    good = _face_labels(c)
    for k in range(MAX_HALVINGS + 1):
        delta = Fraction(1, 2**k)
        if _is_good(c, delta, good):
            return delta
    raise DeltaTooLarge(f"no admissible delta down to 2^-{MAX_HALVINGS} for {c!r}")


def cone_partition(c: Cone, delta=None) -> list[LabeledRegion]:
    """One region per nonzero face of ``c``, ordered like the faces."""
    c.require_pointed()
    good = _face_labels(c)
    if delta is None:
        delta = delta_max(c)
    delta = la.as_fraction(delta)
    if delta <= 0:
        raise DeltaTooLarge("delta must be positive")
    dm = delta_max(c)
    if delta > dm:
        raise DeltaTooLarge(f"delta {delta} exceeds delta_max {dm} for {c!r}")
    if not _is_good(c, delta, good):
        raise DeltaTooLarge(f"delta {delta} produces labels that are not faces of {c!r}")
    regions = [LabeledRegion(c, d, idx, delta) for idx, d in good.items()]
    regions.sort(key=lambda r: (r.face.dim, r.face.rays))
    return regions
