"""Seeded random instances for the property suites."""
from __future__ import annotations

import random

from .repspec import DirectWeights, KernelVerdict, RepExpr, action_kernel, weights_of
from .rootdata import GroupSpec, build_root_datum

_FACTORS = [("Torus", 1), ("Torus", 2), ("GL", 1), ("GL", 2), ("GL", 3), ("SO_odd", 1), ("SO_odd", 2), ("Sp", 2), ("SO_even", 3), ("SO_even", 4)]


def random_group(rng: random.Random, max_rank: int = 4) -> GroupSpec:
    facs = []
    total = 0
    while True:
        opts = [f for f in _FACTORS if total + f[1] <= max_rank]
        if not opts:
            break
        f = rng.choice(opts)
        facs.append(f)
        total += f[1]
        if rng.random() < 0.5:
            break
    return GroupSpec(tuple(facs))


def random_instance(rng: random.Random, max_rank: int = 4, max_weights: int = 10, coeff: int = 2) -> tuple[GroupSpec, RepExpr]:
    """A group and a direct-weight representation whose arrangement can be built."""
    while True:
        g = random_group(rng, max_rank)
        rd = build_root_datum(g)
        k = rng.randint(1, max_weights)
        ws = [tuple(rng.randint(-coeff, coeff) for _ in range(rd.dim_a)) for _ in range(k)]
        e = DirectWeights([(w, rng.randint(1, 2)) for w in ws])
        ks = action_kernel(weights_of(e, rd), rd)
        if ks.verdict is KernelVerdict.CLEAN:
            return g, e

