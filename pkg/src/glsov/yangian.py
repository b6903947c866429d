"""Monodromy matrices of rational gl(N) chains, quantum minors and lambda-minors.

Operators are dense numpy arrays: ``object`` arrays of mpq in exact mode,
``complex128`` in float mode.  Site 1 is the leftmost Kronecker factor.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import linalg
from .chain import ChainSpec
from .glrep import Rep, _group_perms, _perm_sign, _row_col_groups, _check_budget, build_rect_rep
from .scalars import RingTag, max_abs, mpq
from .young import Partition

DIM_CAP = 4096


def identity(dim: int, ring: RingTag) -> np.ndarray:
    return ring.eye(dim)


def commutator(a, b):
    return a.dot(b) - b.dot(a)


class OperatorPoly:
    """Polynomial in u with operator coefficients, ascending."""

    def __init__(self, coeffs: Sequence[np.ndarray], ring: RingTag):
        cs = list(coeffs)
        while len(cs) > 1 and not np.any(cs[-1] != 0):
            cs.pop()
        self.coeffs = cs
        self.ring = ring

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and not np.any(self.coeffs[0] != 0):
            return -1
        return len(self.coeffs) - 1

    @property
    def dim(self) -> int:
        return self.coeffs[0].shape[0]

    def __call__(self, u):
        acc = self.coeffs[-1].copy()
        for c in reversed(self.coeffs[:-1]):
            acc = acc * u + c
        return acc

    def lead(self) -> np.ndarray:
        return self.coeffs[-1]

    def scaled(self, c) -> "OperatorPoly":
        return OperatorPoly([m * c for m in self.coeffs], self.ring)

    def __eq__(self, other):
        if not isinstance(other, OperatorPoly) or len(self.coeffs) != len(other.coeffs):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.coeffs, other.coeffs))

    @classmethod
    def from_samples(cls, fn: Callable, degree: int, ring: RingTag, start=None) -> "OperatorPoly":
        """Reconstruct a polynomial of degree <= ``degree`` from evaluations."""
        if ring.exact:
            pts = [mpq(2 * k + 1, 3) + (start or 0) for k in range(degree + 1)]
        else:
            # roots of unity: the Vandermonde matrix is a scaled DFT, perfectly conditioned
            n = degree + 1
            pts = [complex(np.exp(2j * np.pi * k / n)) + (start or 0) for k in range(n)]
        vals = [fn(u) for u in pts]
        return cls(interpolate_operator(pts, vals, ring), ring)


def interpolate_operator(points, values, ring: RingTag) -> list:
    """Coefficient matrices of the polynomial through (u_k, M_k)."""
    n = len(points)
    V = ring.zeros((n, n))
    for i, u in enumerate(points):
        p = ring.scalar(1)
        for j in range(n):
            V[i, j] = p
            p = p * u
    Vi = linalg.inv(V)
    stack = np.stack(values)
    return [np.tensordot(Vi[j], stack, axes=(0, 0)) for j in range(n)]


def companion_twist(z: Sequence) -> np.ndarray:
    """G_kj = (-1)^{j-1} chi_j delta_{k1} + delta_{k,j+1}, prod (t + z_i) = sum t^{N-i} chi_i."""
    N = len(z)
    exact = all(not isinstance(v, complex) for v in z)
    chi = [mpq(1) if exact else 1 + 0j]
    for v in z:
        # multiply by (t + v): chi_i <- chi_i + v chi_{i-1}
        chi = chi + [0]
        for i in range(len(chi) - 1, 0, -1):
            chi[i] = chi[i] + v * chi[i - 1]
    G = np.empty((N, N), dtype=object if exact else np.complex128)
    G.fill(mpq(0) if exact else 0)
    for j in range(1, N + 1):
        G[0, j - 1] = (-1) ** (j - 1) * chi[j]
        if j < N:
            G[j, j - 1] = 1 if not exact else mpq(1)
    return G


def chi_values(z: Sequence) -> list:
    """Elementary symmetric chi_0..chi_N of z."""
    chi = [1]
    for v in z:
        chi = chi + [0]
        for i in range(len(chi) - 1, 0, -1):
            chi[i] = chi[i] + v * chi[i - 1]
    return chi


@dataclass
class Monodromy:
    """T(u) = R_L(u - theta_L) ... R_1(u - theta_1) with R(u) = u - hbar P, optionally twisted.

    ``coeffs[i][j]`` holds the ascending operator coefficients of the bare
    entry T_{i+1, j+1}(u); twists act as K1 T(u) K2.
    """

    spec: ChainSpec
    rep: Rep
    coeffs: list
    K1: Optional[np.ndarray] = None
    K2: Optional[np.ndarray] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def ring(self) -> RingTag:
        return self.spec.ring

    @property
    def dim(self) -> int:
        return self.coeffs[0][0][0].shape[0]

    @property
    def hbar(self):
        return self.spec.hbar

    def eye(self):
        return self.ring.eye(self.dim)

    def zero(self):
        return self.ring.zeros((self.dim, self.dim))

    def twisted(self, K2=None, K1=None) -> "Monodromy":
        """A monodromy sharing the bare coefficients, dressed as K1 T K2."""
        conv = (lambda K: None if K is None else self.ring.asarray(K))
        return Monodromy(self.spec, self.rep, self.coeffs, conv(K1), conv(K2))

    def bare(self) -> "Monodromy":
        if self.K1 is None and self.K2 is None:
            return self
        return Monodromy(self.spec, self.rep, self.coeffs)

    def entry_poly(self, i: int, j: int) -> OperatorPoly:
        """Bare entry T_ij as an OperatorPoly (1-based)."""
        return OperatorPoly(self.coeffs[i - 1][j - 1], self.ring)

    def _bare_at(self, u):
        key = ("bare", u)
        if key not in self._cache:
            N = self.N
            vals = []
            for i in range(N):
                row = []
                for j in range(N):
                    cs = self.coeffs[i][j]
                    acc = cs[-1].copy()
                    for c in reversed(cs[:-1]):
                        acc = acc * u + c
                    row.append(acc)
                vals.append(row)
            self._cache[key] = vals
        return self._cache[key]

    def at(self, u):
        """N x N nested list of operators T_ij(u) (0-based lists), twisted if set."""
        u = self.ring.scalar(u)
        if self.K1 is None and self.K2 is None:
            return self._bare_at(u)
        key = ("tw", u)
        if key not in self._cache:
            T = self._bare_at(u)
            N = self.N
            if self.K2 is not None:
                T = [[_lincomb([(self.K2[k, j], T[i][k]) for k in range(N)], self) for j in range(N)]
                     for i in range(N)]
            if self.K1 is not None:
                T = [[_lincomb([(self.K1[i, k], T[k][j]) for k in range(N)], self) for j in range(N)]
                     for i in range(N)]
            self._cache[key] = T
        return self._cache[key]

    def T(self, i: int, j: int, u):
        """Entry T_ij(u), 1-based, twisted if set."""
        return self.at(u)[i - 1][j - 1]


def _lincomb(terms, m: Monodromy):
    acc = None
    for c, M in terms:
        if c == 0:
            continue
        acc = M * c if acc is None else acc + M * c
    return m.zero() if acc is None else acc


def build_monodromy(spec: ChainSpec, rep: Optional[Rep] = None) -> Monodromy:
    """Bare monodromy, site by site: T^(a)_ij = (u - theta_a) T_ij - hbar sum_k pi_a(E_ki) T_kj."""
    rep = rep or build_rect_rep(spec)
    ring = spec.ring
    N, d = spec.N, rep.dim
    if d ** spec.L > DIM_CAP:
        raise ValueError(f"dim(H) = {d ** spec.L} exceeds the cap {DIM_CAP}")
    gens = [[ring.asarray(rep.gens[i][j]) for j in range(N)] for i in range(N)]
    one = ring.eye(1)
    coeffs = [[[one if i == j else ring.zeros((1, 1))] for j in range(N)] for i in range(N)]
    for alpha in range(spec.L):
        th, h = spec.theta[alpha], spec.hbar
        Id = ring.eye(d)
        new = []
        for i in range(N):
            row = []
            for j in range(N):
                old = coeffs[i][j]
                deg = len(old)
                out = []
                for c in range(deg + 1):
                    acc = ring.zeros((old[0].shape[0] * d,) * 2)
                    if c >= 1:
                        acc = acc + np.kron(old[c - 1], Id)
                    if c < deg:
                        acc = acc - np.kron(old[c], Id) * th
                        for k in range(N):
                            src = coeffs[k][j]
                            if c < len(src):
                                acc = acc - np.kron(src[c], gens[k][i]) * h
                    out.append(acc)
                row.append(out)
            new.append(row)
        coeffs = new
    return Monodromy(spec, rep, coeffs)


def quantum_minor(m: Monodromy, rows: Sequence[int], cols: Sequence[int], u):
    """sum_sigma sgn(sigma) T_{r_sigma(1) c_1}(u) T_{r_sigma(2) c_2}(u - hbar) ... (1-based indices)."""
    rows, cols = tuple(rows), tuple(cols)
    if len(rows) != len(cols):
        raise ValueError("row and column multisets must have equal size")
    if len(rows) > m.N:
        raise ValueError("minor larger than N")
    return _minor(m, rows, cols, m.ring.scalar(u))


def _minor(m: Monodromy, rows, cols, u):
    if not rows:
        return m.eye()
    key = ("minor", rows, cols, u)
    if key in m._cache:
        return m._cache[key]
    T = m.at(u)
    acc = None
    for r, ri in enumerate(rows):
        sub = _minor(m, rows[:r] + rows[r + 1:], cols[1:], u - m.hbar)
        term = T[ri - 1][cols[0] - 1].dot(sub)
        if r % 2:
            term = -term
        acc = term if acc is None else acc + term
    m._cache[key] = acc
    return acc


def box_permutations(shape: Partition) -> dict:
    """Signed box maps of the Young symmetriser acting on the upper filling.

    For each pair (sigma, sigma~) the box map p(a,s) = (sigma~_s(a),
    sigma_{sigma~_s(a)}(s)) is built and its inverse is stored: the minor
    reads T_{A_{p^-1(b)}, B_b} at box b.  Reading the map the other way
    round breaks commutativity of the fused transfer matrices already
    for the shape (2,1).  Returns {map: weight}, maps as tuples over boxes
    in row-reading order.
    """
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    boxes = shape.boxes()
    pos = {b: i for i, b in enumerate(boxes)}
    t = shape.transpose()
    out = {}
    row_choices = [list(itertools.permutations(range(1, shape[a] + 1))) for a in range(shape.height)]
    col_choices = [list(itertools.permutations(range(1, t[s] + 1))) for s in range(shape.width)]
    for sig in itertools.product(*row_choices):
        for sigt in itertools.product(*col_choices):
            sgn = 1
            for c in sigt:
                sgn *= _perm_sign([v - 1 for v in c])
            pi = []
            for a, s in boxes:
                a2 = sigt[s - 1][a - 1]
                s2 = sig[a2 - 1][s - 1]
                pi.append(pos[(a2, s2)])
            inv = [0] * len(pi)
            for b, c in enumerate(pi):
                inv[c] = b
            inv = tuple(inv)
            out[inv] = out.get(inv, 0) + sgn
    return {k: v for k, v in out.items() if v}


def box_shifts(shape: Partition, hbar):
    return [hbar * (s - a) for a, s in shape.boxes()]


def fused_minor(m: Monodromy, shape, tabA: Sequence[int], tabB: Sequence[int], u):
    """lambda-minor T[^A_B](u), fillings given in row-reading order (1-based entries)."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    _check_budget(shape.size)
    if len(tabA) != shape.size or len(tabB) != shape.size:
        raise ValueError("fillings must have one entry per box")
    u = m.ring.scalar(u)
    if shape.size == 0:
        return m.eye()
    shifts = box_shifts(shape, m.hbar)
    Ts = [m.at(u + sh) for sh in shifts]
    acc = m.zero()
    for pi, w in box_permutations(shape).items():
        prod = None
        for b, tb in enumerate(Ts):
            M = tb[tabA[pi[b]] - 1][tabB[b] - 1]
            prod = M if prod is None else prod.dot(M)
        acc = acc + prod * w
    return acc


def rtt_residual(m: Monodromy, u, v):
    """Max-norm defect of (u-v)[T_ij(u),T_kl(v)] = hbar(T_kj(u)T_il(v) - T_kj(v)T_il(u))."""
    u, v = m.ring.scalar(u), m.ring.scalar(v)
    if u == v:
        raise ValueError("u and v must differ")
    Tu, Tv = m.at(u), m.at(v)
    N = m.N
    worst = mpq(0) if m.ring.exact else 0.0
    for i, j, k, l in itertools.product(range(N), repeat=4):
        lhs = commutator(Tu[i][j], Tv[k][l]) * (u - v)
        rhs = (Tu[k][j].dot(Tv[i][l]) - Tv[k][j].dot(Tu[i][l])) * m.hbar
        worst = max(worst, max_abs(lhs - rhs))
    return worst


def minor_commutation_residual(m: Monodromy, shape, tabA, tabB, j: int, k: int, u, v):
    """Defect of the commutator of T_jk(v) with a lambda-minor T[^A_B](u).

    (v-u)/hbar [T_jk(v), T[A;B](u)] = sum_i T_{A_i k}(v) T[A[i;j];B](u)
                                     - sum_i T[A;B[i;k]](u) T_{j B_i}(v)
    """
    u, v = m.ring.scalar(u), m.ring.scalar(v)
    Tv = m.at(v)
    M = fused_minor(m, shape, tabA, tabB, u)
    lhs = commutator(Tv[j - 1][k - 1], M) * ((v - u) / m.hbar)
    rhs = m.zero()
    for i in range(len(tabA)):
        a2 = list(tabA)
        a2[i] = j
        rhs = rhs + Tv[tabA[i] - 1][k - 1].dot(fused_minor(m, shape, a2, tabB, u))
    for i in range(len(tabB)):
        b2 = list(tabB)
        b2[i] = k
        rhs = rhs - fused_minor(m, shape, tabA, b2, u).dot(Tv[j - 1][tabB[i] - 1])
    return max_abs(lhs - rhs)
