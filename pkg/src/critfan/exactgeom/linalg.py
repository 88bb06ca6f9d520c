"""Exact linear algebra over the rationals.

Vectors are plain tuples of ``int`` or ``Fraction``.  Nothing in here ever
rounds; integer inputs stay integers wherever the algorithm allows it.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence

from ..errors import DimensionMismatch

Vector = tuple


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing float input {x!r}; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def frac_vector(seq: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in seq)


def dot(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise DimensionMismatch(f"length {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def common_length(vectors: Iterable[Sequence], n: int | None = None) -> int | None:
    for v in vectors:
        if n is None:
            n = len(v)
        elif len(v) != n:
            raise DimensionMismatch(f"expected length {n}, got {len(v)}")
    return n


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Positive rescaling of a rational vector to a primitive integer vector."""
    fr = frac_vector(vec)
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    if g == 0:
        return tuple(0 for _ in ints)
    return tuple(x // g for x in ints)


def int_primitive(vec: Sequence[int]) -> tuple[int, ...]:
    g = reduce(gcd, (abs(x) for x in vec), 0)
    if g <= 1:
        return tuple(vec)
    return tuple(x // g for x in vec)


def is_zero(vec: Sequence) -> bool:
    return all(x == 0 for x in vec)


def rref(rows: Iterable[Sequence], n: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(frac_vector(r)) for r in rows]
    for r in m:
        if len(r) != n:
            raise DimensionMismatch(f"expected length {n}, got {len(r)}")
    pivots: list[int] = []
    row = 0
    for col in range(n):
        sel = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if sel is None:
            continue
        m[row], m[sel] = m[sel], m[row]
        piv = m[row][col]
        if piv != 1:
            m[row] = [x / piv for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    return m[:row], pivots


def int_rank(rows: Iterable[Sequence[int]]) -> int:
    """Rank of integer rows by fraction-free elimination."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    n = len(m[0])
    r = 0
    for col in range(n):
        sel = next((i for i in range(r, len(m)) if m[i][col]), None)
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        p = m[r]
        a = p[col]
        for i in range(r + 1, len(m)):
            b = m[i][col]
            if b:
                row = [a * x - b * y for x, y in zip(m[i], p)]
                g = reduce(gcd, row, 0)
                m[i] = [x // g for x in row] if g > 1 else row
        r += 1
        if r == len(m):
            break
    return r


@lru_cache(maxsize=65536)
def primitive_cached(vec: tuple) -> tuple[int, ...]:
    return primitive(vec)


def rank(rows: Iterable[Sequence], n: int | None = None) -> int:
    rows = list(rows)
    if not rows:
        return 0
    if n is None:
        n = len(rows[0])
    return len(rref(rows, n)[0])


def nullspace(rows: Iterable[Sequence], n: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x : r.x = 0 for every row r}."""
    red, pivots = rref(rows, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in zip(red, pivots):
            v[p] = -r[f]
        basis.append(tuple(v))
    return basis


def canonical_basis(vectors: Iterable[Sequence], n: int) -> tuple[tuple[int, ...], ...]:
    """Canonical integer basis of the span: primitive multiples of the RREF rows."""
    red, _ = rref(vectors, n)
    return tuple(primitive(r) for r in red)


def annihilator(vectors: Iterable[Sequence], n: int) -> tuple[tuple[int, ...], ...]:
    """Canonical integer basis of the functionals vanishing on span(vectors)."""
    return canonical_basis(nullspace(vectors, n), n)


def reduce_mod(vec: Sequence, red: Sequence[Sequence[Fraction]], pivots: Sequence[int]):
    """Normal form of ``vec`` modulo the row space given in RREF."""
    v = list(frac_vector(vec))
    for r, p in zip(red, pivots):
        if v[p] != 0:
            f = v[p]
            v = [a - f * b for a, b in zip(v, r)]
    return tuple(v)


def in_span(vec: Sequence, vectors: Sequence[Sequence], n: int) -> bool:
    red, piv = rref(vectors, n)
    return is_zero(reduce_mod(vec, red, piv))


def solve_in_basis(vec: Sequence, basis: Sequence[Sequence], n: int):
    """Coefficients c with sum c_i basis_i = vec, or None if vec is outside the span."""
    k = len(basis)
    # columns are basis vectors; augment with vec
    aug = [[as_fraction(basis[j][i]) for j in range(k)] + [as_fraction(vec[i])] for i in range(n)]
    red, piv = rref(aug, k + 1)
    if k in piv:
        return None
    coeffs = [Fraction(0)] * k
    for r, p in zip(red, piv):
        coeffs[p] = r[k]
    return tuple(coeffs)


def subspace_intersection_dim(a: Sequence[Sequence], b: Sequence[Sequence], n: int) -> int:
    return rank(a, n) + rank(b, n) - rank(list(a) + list(b), n)


def fmt_rational(x) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def scaled_ints(vec: Sequence) -> tuple[tuple[int, ...], int]:
    """(integers, denominator) with vec == integers / denominator."""
    fr = frac_vector(vec)
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in fr), 1)
    return tuple(int(x * den) for x in fr), den
