"""Exponent arrangements: a fan on the anti-dominant cone plus exponents per cone.

Exponents are linear functionals on the whole cocharacter space.  Two
exponents are considered equal on a cone when they pair identically with
every ray of that cone.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Sequence

from .errors import CentralTorusActsTrivially, IrregularKernel, MixedSign, NotInFan
from .exactgeom import Cone, Sign, Fan, StarFan, fan_from_hyperplanes, star_fan, stellar_refine_to_simplicial
from .exactgeom import linalg as la
from .exactgeom.refine import refinement_parent
from .repspec import KernelSplit, KernelVerdict, WeightMultiset, _int_sign, action_kernel
from .rootdata import RootDatum

Functional = tuple
Multiset = tuple  # sorted tuple of (Functional, multiplicity)


def _ms(counter: Counter) -> Multiset:
    return tuple(sorted((la.frac_vector(k), v) for k, v in counter.items() if v))


def _zero(n: int) -> Functional:
    return tuple(Fraction(0) for _ in range(n))


@dataclass(frozen=True, eq=False)
class ExponentArrangement:
    fan: Fan
    exponents: dict  # cone rays -> Multiset
    weights: WeightMultiset | None = None
    root_datum: RootDatum | None = field(default=None, repr=False)
    kernel: KernelSplit | None = None

    def exponents_of(self, c: Cone) -> Multiset:
        try:
            return self.exponents[c.rays]
        except KeyError:
            raise NotInFan(repr(c)) from None

    def chi(self, c: Cone) -> Functional:
        """The exponent of ``c`` when it is a single character."""
        ms = self.exponents_of(c)
        if len(ms) != 1:
            raise ValueError(f"cone {c!r} carries {len(ms)} distinct exponents")
        return ms[0][0]

    def with_exponents(self, exponents: dict, fan: Fan | None = None) -> "ExponentArrangement":
        return ExponentArrangement(fan or self.fan, exponents, self.weights, self.root_datum, self.kernel)


def build_arrangement(rd: RootDatum, w: WeightMultiset) -> ExponentArrangement:
    n = rd.dim_a
    ks = action_kernel(w, rd)
    if ks.verdict is KernelVerdict.CENTRAL_TRIVIAL:
        raise CentralTorusActsTrivially(
            f"kernel of the action {[list(v) for v in ks.a0]} meets the center; a central split torus acts trivially"
        )
    if ks.verdict is KernelVerdict.IRREGULAR:
        raise IrregularKernel(f"kernel {[list(v) for v in ks.a0]} is not a sum of simple factors")
    anti = rd.antidominant
    extra = la.annihilator(ks.a_prime, n) if ks.a0 else ()
    base = Cone.from_h(anti.ineqs, anti.eqs + tuple(extra), n) if extra else anti
    hyps = [la.primitive(v) for v in w.nonzero()] + [tuple(a) for a in rd.simple_roots]
    fan = fan_from_hyperplanes(base, hyps)
    den, ints = w.scaled
    exps = {}
    for c in fan.cones:
        tot = [0] * n
        for (iv, m), sgn in zip(ints, _signs(ints, c)):
            if sgn is Sign.POSITIVE:
                for j in range(n):
                    tot[j] -= m * iv[j]
        exps[c.rays] = ((tuple(Fraction(x, den) for x in tot), 1),)
    return ExponentArrangement(fan, exps, w, rd, ks)


def _signs(ints, c: Cone):
    out = []
    for iv, _ in ints:
        s = _int_sign(iv, c)
        if s is Sign.MIXED:
            raise MixedSign(f"weight {iv} changes sign on {c!r}")
        out.append(s)
    return out


def _restriction(chi: Functional, c: Cone) -> tuple:
    return tuple(la.dot(chi, r) for r in c.rays)


def check_compatibility(a: ExponentArrangement) -> list[str]:
    """Violations of the face condition.

    For each face C1 of C2 and each restriction class of E(C2) on span(C1),
    E(C1) must hold that restriction with multiplicity at least the largest
    multiplicity occurring in the class.
    """
    diags = []
    fan = a.fan
    rays = fan.rays
    den = 1
    for ms in a.exponents.values():
        for chi, _ in ms:
            for x in chi:
                den = den * x.denominator // gcd(den, x.denominator)
    # pairings of every exponent with every ray, as integers scaled by den
    table = []
    for c in fan.cones:
        rows = []
        for chi, m in a.exponents.get(c.rays, ()):
            iv = [int(x * den) for x in chi]
            rows.append((chi, m, [sum(x * y for x, y in zip(iv, r)) for r in rays]))
        table.append(rows)
    ray_idx = [[fan.ray_index(r) for r in c.rays] for c in fan.cones]
    masks = fan.ray_masks
    for j, c2 in enumerate(fan.cones):
        for i, c1 in enumerate(fan.cones):
            if i == j or masks[i] & masks[j] != masks[i]:
                continue
            idx = ray_idx[i]
            need: dict[tuple, tuple[int, Functional]] = {}
            for chi, m, vals in table[j]:
                key = tuple(vals[k] for k in idx)
                if key not in need or need[key][0] < m:
                    need[key] = (m, chi)
            have: Counter = Counter()
            for _, m, vals in table[i]:
                have[tuple(vals[k] for k in idx)] += m
            for key, (m, chi) in sorted(need.items()):
                if have[key] < m:
                    diags.append(
                        f"face {c1!r} of {c2!r}: exponent {[la.fmt_rational(x) for x in chi]} restricts to "
                        f"{[la.fmt_rational(Fraction(x, den)) for x in key]} with multiplicity {m}, found {have[key]}"
                    )
    return diags


def shift(a: ExponentArrangement, d: Sequence) -> ExponentArrangement:
    d = la.frac_vector(d)
    out = {}
    for rays, ms in a.exponents.items():
        c: Counter = Counter()
        for chi, m in ms:
            c[tuple(x + y for x, y in zip(chi, d))] += m
        out[rays] = _ms(c)
    return a.with_exponents(out)


@dataclass(frozen=True, eq=False)
class DerivativeArrangement:
    base_cone: Cone
    star: StarFan
    exponents: dict  # quotient cone rays -> Multiset inherited from the source cone

    @property
    def fan(self) -> Fan:
        return self.star.fan


def derivative_arrangement(a: ExponentArrangement, d: Cone) -> DerivativeArrangement:
    st = star_fan(a.fan, d)
    exps = {rays: a.exponents_of(src) for rays, src in st.source.items()}
    return DerivativeArrangement(d, st, exps)


def eval_exponent(a: ExponentArrangement, lam: Sequence) -> Fraction:
    lam = la.frac_vector(lam)
    c = a.fan.locate(lam)
    vals = {la.dot(chi, lam) for chi, _ in a.exponents_of(c)}
    if len(vals) != 1:
        raise ValueError(f"exponents of {c!r} disagree at {lam}")
    return vals.pop()


def refine_arrangement(
    a: ExponentArrangement,
    avoid: Callable[[Cone], Sequence] | Sequence | None = None,
    strategy: str = "pull",
) -> ExponentArrangement:
    """Simplicial refinement; each new cone inherits the exponents of the cone containing its relative interior."""
    refined = stellar_refine_to_simplicial(a.fan, avoid=avoid, strategy=strategy)
    parent = refinement_parent(a.fan, refined)
    exps = {rays: a.exponents_of(p) for rays, p in parent.items()}
    return a.with_exponents(exps, refined)
