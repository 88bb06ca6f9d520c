"""Stellar subdivision of a fan into a simplicial one."""
from __future__ import annotations

from itertools import combinations
from typing import Callable, Sequence, Union

from ..errors import RefinementObstruction
from . import linalg as la
from .cone import Cone, _idot
from .fan import Fan

Avoid = Union[Sequence, Callable[[Cone], "Sequence | None"], None]

STRATEGIES = ("pull", "interior")


def _simplex(rays, n) -> Cone:
    return Cone(n, tuple(sorted(set(rays))), ())


def _interior_point(c: Cone) -> tuple[int, ...]:
    """Sum of two non-adjacent rays when that lands in the relative interior.

    Falls back to the sum of all rays, which is always interior.
    """
    masks = c.facet_ray_masks()
    rays = c.rays
    for i, j in combinations(range(len(rays)), 2):
        pair = (1 << i) | (1 << j)
        common = [m for m in masks if m & pair == pair]
        # cone(r_i, r_j) is a face iff the facets through both cut out exactly this pair
        full = (1 << len(rays)) - 1
        meet = full
        for m in common:
            meet &= m
        if meet == pair:
            continue
        w = tuple(a + b for a, b in zip(rays[i], rays[j]))
        if c.in_relint(w):
            return w
    return c.relint_point()


def _avoid_functional(avoid: Avoid, c: Cone):
    if avoid is None:
        return None
    if callable(avoid):
        return avoid(c)
    return avoid


def stellar_refine_to_simplicial(f: Fan, avoid: Avoid = None, strategy: str = "pull") -> Fan:
    """Simplicial refinement with the same support and every original ray kept.

    ``pull`` cones off the boundary of each non-simplicial cone from its
    lexicographically smallest ray and adds no rays.  ``interior`` stars at a
    new interior ray; ``avoid`` (a functional, or a callable giving one per
    cone) keeps new rays off that functional's zero set.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    n = f.ambient
    sub: dict[tuple, list[Cone]] = {}
    for c in sorted(f.cones, key=lambda x: (x.dim, x.rays)):
        if c.is_simplicial:
            sub[c.rays] = [c]
            continue
        rs = set(c.rays)
        facets = [d for d in f.cones if d.dim == c.dim - 1 and set(d.rays) <= rs]
        if strategy == "pull":
            apex = c.rays[0]
            pieces = [
                _simplex(s.rays + (apex,), n)
                for d in facets
                if apex not in d.rays
                for s in sub[d.rays]
            ]
        else:
            w = _interior_point(c)
            a = _avoid_functional(avoid, c)
            if a is not None and la.dot(a, w) == 0:
                for r in c.rays:
                    cand = tuple(x + y for x, y in zip(w, r))
                    if la.dot(a, cand) != 0 and c.in_relint(cand):
                        w = cand
                        break
                else:
                    raise RefinementObstruction(
                        f"functional {tuple(a)} vanishes on all of {c!r}; no interior ray avoids it"
                    )
            w = la.primitive(w)
            pieces = [_simplex(s.rays + (w,), n) for d in facets for s in sub[d.rays]]
        sub[c.rays] = pieces
    tops = [p for m in f.maximal_cones for p in sub[m.rays]]
    return Fan.from_maximal(tops, f.support)


def refinement_parent(original: Fan, refined: Fan) -> dict[tuple, Cone]:
    """Map each refined cone (by rays) to the original cone containing its relative interior."""
    return {c.rays: original.locate(c.relint_point()) for c in refined.cones}
