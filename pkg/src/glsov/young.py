"""Partitions, Gelfand-Tsetlin patterns, rectangular relabelling and Schur characters."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial, prod
from typing import Iterator, Sequence

import numpy as np

from . import linalg
from .poly import Poly
from .scalars import is_exact_scalar, mpq, to_exact


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple

    def __init__(self, parts: Sequence[int] = ()):
        p = [int(v) for v in parts]
        if any(v < 0 for v in p) or any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise ValueError(f"{list(parts)} is not a partition")
        while p and p[-1] == 0:
            p.pop()
        object.__setattr__(self, "parts", tuple(p))

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, i):
        return self.parts[i] if i < len(self.parts) else 0

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def height(self) -> int:
        return len(self.parts)

    @property
    def width(self) -> int:
        return self.parts[0] if self.parts else 0

    def transpose(self) -> "Partition":
        return Partition([sum(1 for p in self.parts if p > s) for s in range(self.width)])

    def padded(self, n: int) -> tuple:
        if n < len(self.parts):
            raise ValueError("partition has more than n parts")
        return self.parts + (0,) * (n - len(self.parts))

    def shifted(self, n: int) -> tuple:
        """Shifted weights lambda_j - j + 1 for j = 1..n."""
        return tuple(v - j for j, v in enumerate(self.padded(n)))

    def contains(self, other: "Partition") -> bool:
        return all(self[i] >= other[i] for i in range(max(len(self), len(other))))

    def boxes(self) -> list:
        """Boxes (a, s), 1-based, in row-reading order."""
        return [(a + 1, s + 1) for a, p in enumerate(self.parts) for s in range(p)]

    def n_standard(self) -> int:
        """Number of standard tableaux (hook length formula)."""
        t = self.transpose()
        hooks = prod(self.parts[a - 1] - s + t[s - 1] - a + 1 for a, s in self.boxes())
        return factorial(self.size) // hooks

    def __repr__(self):
        return f"Partition({list(self.parts)})"


def partitions_in_box(rows: int, cols: int) -> list:
    """All partitions fitting inside a rows x cols rectangle."""
    out = []
    for p in itertools.product(range(cols, -1, -1), repeat=rows):
        if all(p[i] >= p[i + 1] for i in range(rows - 1)):
            out.append(Partition(p))
    return sorted(set(out), key=lambda q: (q.size, q.parts))


def weyl_dim(nu: Sequence[int], N: int) -> int:
    nu = Partition(nu).padded(N)
    num = prod(nu[i] - nu[j] + j - i for i in range(N) for j in range(i + 1, N))
    den = prod(j - i for i in range(N) for j in range(i + 1, N))
    return num // den


@dataclass(frozen=True)
class GTPattern:
    """Rows lambda_k = (lambda_{k1}, ..., lambda_{kk}) for k = 1..N (rows[k-1])."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for k, r in enumerate(rows, start=1):
            if len(r) != k:
                raise ValueError("row k of a GT pattern must have k entries")
        for k in range(1, len(rows)):
            up, low = rows[k], rows[k - 1]
            for i in range(k):
                if not (up[i] >= low[i] >= up[i + 1]):
                    raise ValueError("GT pattern violates the interlacing rule")

    @property
    def N(self) -> int:
        return len(self.rows)

    def node(self, k: int, i: int) -> int:
        return self.rows[k - 1][i - 1]

    def weight(self) -> tuple:
        """Eigenvalues of E_kk: row sums differences."""
        sums = [0] + [sum(r) for r in self.rows]
        return tuple(sums[k] - sums[k - 1] for k in range(1, len(sums)))


def enumerate_gt(nu: Sequence[int], N: int) -> list:
    """All GT patterns with top row nu.

    Ordered reverse-lexicographically by (row 1, row 2, ...), so the highest
    weight pattern comes first and the defining representation gets the
    standard basis e_1, ..., e_N.
    """
    top = Partition(nu).padded(N)

    def below(row):
        ranges = [range(row[i + 1], row[i] + 1) for i in range(len(row) - 1)]
        return [tuple(c) for c in itertools.product(*ranges)]

    def build(row):
        if len(row) == 1:
            return [[row]]
        out = []
        for r in below(row):
            for chain in build(r):
                out.append(chain + [row])
        return out

    pats = [GTPattern(tuple(c)) for c in build(tuple(top))]
    return sorted(pats, key=lambda p: tuple(itertools.chain(*p.rows[:-1])), reverse=True)


@dataclass(frozen=True)
class RectPattern:
    """(N-A) x A table m_{kj}; row k is the partition mu_k."""

    m: tuple
    S: int

    def __post_init__(self):
        m = tuple(tuple(int(v) for v in r) for r in self.m)
        object.__setattr__(self, "m", m)
        if m:
            A = len(m[0])
            if any(len(r) != A for r in m):
                raise ValueError("ragged m-table")
        for k, r in enumerate(m):
            for j, v in enumerate(r):
                hi = r[j - 1] if j else self.S
                if not (0 <= v <= hi):
                    raise ValueError("m-table rows must be partitions inside (S^A)")
                if k + 1 < len(m) and v > m[k + 1][j]:
                    raise ValueError("m-table rows must form a containment chain")

    @property
    def rows(self) -> list:
        return [Partition(r) for r in self.m]

    def flat(self) -> tuple:
        return tuple(itertools.chain(*self.m))


def enumerate_rect(N: int, A: int, S: int) -> list:
    """All RectPatterns, ordered lexicographically on the flattened table."""
    rows = [p.padded(A) for p in partitions_in_box(A, S)]
    out = []

    def grow(chain):
        if len(chain) == N - A:
            out.append(RectPattern(tuple(chain), S))
            return
        for r in rows:
            if not chain or all(r[j] >= chain[-1][j] for j in range(A)):
                grow(chain + [r])

    grow([])
    return sorted(out, key=RectPattern.flat)


def _frozen_value(k, i, N, A, S):
    """Value of a frozen node, or None if the node is free."""
    if i > A:
        return 0
    if k - i >= N - A:
        return S
    return None


def rect_from_gt(p: GTPattern, A: int, S: int) -> RectPattern:
    N = p.N
    if p.rows[-1] != (S,) * A + (0,) * (N - A):
        raise ValueError("pattern top row is not the rectangular weight")
    for k in range(1, N):
        for i in range(1, k + 1):
            v = _frozen_value(k, i, N, A, S)
            if v is not None and p.node(k, i) != v:
                raise ValueError("pattern is not of rectangular type")
    m = tuple(tuple(p.node(k + j - 1, j) for j in range(1, A + 1)) for k in range(1, N - A + 1))
    return RectPattern(m, S)


def gt_from_rect(r: RectPattern, N: int, A: int) -> GTPattern:
    S = r.S
    rows = []
    for k in range(1, N + 1):
        row = []
        for i in range(1, k + 1):
            v = S if k == N and i <= A else _frozen_value(k, i, N, A, S)
            if k == N and i > A:
                v = 0
            row.append(r.m[k - i][i - 1] if v is None else v)
        rows.append(tuple(row))
    return GTPattern(tuple(rows))


def enumerate_tuples(N: int, A: int, S: int, L: int) -> list:
    """L-tuples of RectPatterns, site 1 varying slowest."""
    return [tuple(t) for t in itertools.product(enumerate_rect(N, A, S), repeat=L)]


def ssyt(shape: Partition, n: int) -> Iterator[tuple]:
    """Semistandard fillings with entries 1..n, as tuples in row-reading order."""
    boxes = shape.boxes()
    pos = {b: i for i, b in enumerate(boxes)}
    fill = [0] * len(boxes)

    def rec(idx):
        if idx == len(boxes):
            yield tuple(fill)
            return
        a, s = boxes[idx]
        lo = 1
        if s > 1:
            lo = max(lo, fill[pos[(a, s - 1)]])
        if a > 1:
            lo = max(lo, fill[pos[(a - 1, s)]] + 1)
        for v in range(lo, n + 1):
            fill[idx] = v
            yield from rec(idx + 1)

    yield from rec(0)


def schur_ssyt(mu: Partition, z: Sequence):
    mu = Partition(mu.parts if isinstance(mu, Partition) else mu)
    if mu.height > len(z):
        return mpq(0) if all(is_exact_scalar(v) for v in z) else 0j
    exact = all(is_exact_scalar(v) for v in z)
    zz = [to_exact(v) if exact else complex(v) for v in z]
    acc = mpq(0) if exact else 0j
    for t in ssyt(mu, len(zz)):
        term = mpq(1) if exact else 1 + 0j
        for v in t:
            term = term * zz[v - 1]
        acc += term
    return acc


def schur_det(mu: Partition, z: Sequence):
    """Determinant ratio det z_i^{mu_j - j + 1} / det z_i^{1 - j}."""
    mu = Partition(mu.parts if isinstance(mu, Partition) else mu)
    A = len(z)
    if mu.height > A:
        raise ValueError("partition taller than the number of variables")
    exact = all(is_exact_scalar(v) for v in z)
    zz = [to_exact(v) if exact else complex(v) for v in z]
    if any(v == 0 for v in zz) or len(set(zz)) < A:
        raise ZeroDivisionError("degenerate z for the determinant backend")
    sh = mu.shifted(A)
    num = np.array([[zi ** e for e in sh] for zi in zz], dtype=object if exact else complex)
    den = np.array([[zi ** (-j) for j in range(A)] for zi in zz], dtype=object if exact else complex)
    return linalg.det(num) / linalg.det(den)


def schur(mu, z: Sequence):
    """Schur character; determinant backend with SSYT fallback on degenerate z."""
    mu = mu if isinstance(mu, Partition) else Partition(mu)
    try:
        return schur_det(mu, z)
    except (ZeroDivisionError, ValueError):
        return schur_ssyt(mu, z)


def predicted_x(t: Sequence[RectPattern], spec) -> tuple:
    """Separated-variable eigenvalues x^alpha_{kj} and b(u) = prod (u - x)."""
    if len(t) != spec.L:
        raise ValueError("pattern tuple length differs from L")
    h = spec.hbar
    xs = []
    b = Poly([1])
    for alpha, pat in enumerate(t):
        th = spec.theta[alpha]
        site = [[th + h * (v - j) for j, v in enumerate(row)] for row in pat.m]
        for row in site:
            for x in row:
                b = b * Poly([-x, 1])
        xs.append(site)
    return xs, b
