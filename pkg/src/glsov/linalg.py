"""Exact dense linear algebra over the rationals.

Thin adapters between numpy object arrays of mpq and sympy's ``DomainMatrix``
over ``QQ`` (whose elements are themselves mpq), plus the float fallbacks.
"""
from __future__ import annotations

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .scalars import is_exact_array, mpq


def to_dm(a) -> DomainMatrix:
    a = np.asarray(a, dtype=object)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    rows = [[QQ.convert(mpq(v)) for v in row] for row in a]
    return DomainMatrix(rows, a.shape, QQ)


def from_dm(m: DomainMatrix) -> np.ndarray:
    rows, cols = m.shape
    out = np.empty((rows, cols), dtype=object)
    lst = m.to_list()
    for i in range(rows):
        for j in range(cols):
            out[i, j] = mpq(lst[i][j])
    return out


def rank(a, tol=1e-9) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    if is_exact_array(a):
        return to_dm(a).rank()
    return int(np.linalg.matrix_rank(a, tol=tol * max(1.0, np.max(np.abs(a)))))


def nullspace(a) -> np.ndarray:
    """Right nullspace basis as rows (exact)."""
    a = np.asarray(a, dtype=object)
    ns = to_dm(a).nullspace()
    if ns.shape[0] == 0:
        return np.empty((0, a.shape[1]), dtype=object)
    return from_dm(ns)


def solve(a, b):
    """Solve ``a x = b`` for square invertible ``a``."""
    if is_exact_array(a) or is_exact_array(b):
        b = np.asarray(b, dtype=object)
        vec = b.ndim == 1
        bm = b.reshape(-1, 1) if vec else b
        x = from_dm(to_dm(a).lu_solve(to_dm(bm)))
        return x.ravel() if vec else x
    return np.linalg.solve(a, b)


def inv(a):
    if is_exact_array(a):
        return from_dm(to_dm(a).inv())
    return np.linalg.inv(a)


def det(a):
    if is_exact_array(a):
        return mpq(to_dm(a).det())
    return complex(np.linalg.det(a))


def charpoly(a):
    """Characteristic polynomial coefficients, ascending, monic."""
    if is_exact_array(a):
        coeffs = [mpq(c) for c in to_dm(a).charpoly()]
    else:
        coeffs = list(np.poly(np.asarray(a, dtype=np.complex128)))
    return coeffs[::-1]


def independent_columns(a):
    """Indices of a maximal set of linearly independent columns (exact)."""
    a = np.asarray(a, dtype=object)
    _, pivots = to_dm(a).rref()
    return list(pivots)
