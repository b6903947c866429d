"""Finite-dimensional gl(N) irreps realised inside tensor powers of C^N.

The irrep with weight nu is the image of the Young symmetriser (row
symmetrisation followed by column antisymmetrisation) acting on
(C^N)^{(x)|nu|}.  Generators are then written in a Gelfand-Tsetlin basis,
found exactly as joint eigenvectors of leading principal quantum minors.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .scalars import mpq
from .young import GTPattern, Partition, enumerate_gt, weyl_dim

BOX_BUDGET = 6


def _perm_sign(p) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, cyc = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            cyc += 1
        sign *= (-1) ** (cyc - 1)
    return sign


def _row_col_groups(shape: Partition):
    boxes = shape.boxes()
    pos = {b: i for i, b in enumerate(boxes)}
    rows = [[pos[(a, s)] for s in range(1, shape[a - 1] + 1)] for a in range(1, shape.height + 1)]
    t = shape.transpose()
    cols = [[pos[(a, s)] for a in range(1, t[s - 1] + 1)] for s in range(1, shape.width + 1)]
    return rows, cols


def _group_perms(groups, n, signed):
    """All permutations of range(n) preserving each group, with signs."""
    out = []
    for choice in itertools.product(*[itertools.permutations(g) for g in groups]):
        p = list(range(n))
        sign = 1
        for g, img in zip(groups, choice):
            for a, b in zip(g, img):
                p[a] = b
            if signed:
                sign *= _perm_sign([g.index(b) for b in img])
        out.append((tuple(p), sign))
    return out


def _check_budget(n):
    if n > BOX_BUDGET:
        raise ValueError(f"{n} boxes exceed the box budget {BOX_BUDGET}")


def _apply_perm(vec: dict, p) -> dict:
    """Permute tensor factors: factor b moves to position p[b]."""
    out = {}
    for idx, c in vec.items():
        new = [0] * len(idx)
        for b, v in enumerate(idx):
            new[p[b]] = v
        new = tuple(new)
        out[new] = out.get(new, 0) + c
    return out


def _young_apply(shape: Partition, vec: dict) -> dict:
    n = shape.size
    rows, cols = _row_col_groups(shape)
    acc = {}
    for p, _ in _group_perms(rows, n, False):
        for k, v in _apply_perm(vec, p).items():
            acc[k] = acc.get(k, 0) + v
    out = {}
    for p, sg in _group_perms(cols, n, True):
        for k, v in _apply_perm(acc, p).items():
            out[k] = out.get(k, 0) + sg * v
    return {k: mpq(v) for k, v in out.items() if v != 0}


def young_projector(shape, N: int) -> np.ndarray:
    """Young symmetriser C.R as a dense matrix on (C^N)^{(x)n} (idempotent up to scale)."""
    shape = shape if isinstance(shape, Partition) else Partition(shape)
    n = shape.size
    _check_budget(n)
    dim = N ** n
    out = np.empty((dim, dim), dtype=object)
    out.fill(mpq(0))
    for col, idx in enumerate(itertools.product(range(N), repeat=n)):
        for k, v in _young_apply(shape, {idx: 1}).items():
            out[np.ravel_multi_index(k, (N,) * n), col] = v
    return out


@dataclass(frozen=True)
class Rep:
    N: int
    weight: Partition
    patterns: tuple           # GT patterns labelling the basis, in enumerate_gt order
    embedding: np.ndarray     # N^n x dim, columns are basis vectors
    pivots: tuple             # rows of embedding forming an invertible block
    pivot_inv: np.ndarray
    gens: tuple               # gens[i][j] = pi(E_{i+1, j+1})

    @property
    def dim(self) -> int:
        return len(self.patterns)

    @property
    def n_boxes(self) -> int:
        return self.weight.size

    def E(self, i: int, j: int) -> np.ndarray:
        """pi(E_ij) with 1-based indices."""
        return self.gens[i - 1][j - 1]

    def index_of(self, pattern: GTPattern) -> int:
        return self.patterns.index(pattern)

    def hws_index(self) -> int:
        nu = self.weight.padded(self.N)
        rows = tuple(tuple(nu[:k]) for k in range(1, self.N + 1))
        return self.index_of(GTPattern(rows))

    def lws_index(self) -> int:
        nu = self.weight.padded(self.N)
        rows = tuple(tuple(nu[self.N - k:]) for k in range(1, self.N + 1))
        return self.index_of(GTPattern(rows))

    def one_hot(self, i: int) -> np.ndarray:
        v = np.empty(self.dim, dtype=object)
        v.fill(mpq(0))
        v[i] = mpq(1)
        return v

    def coords(self, w: np.ndarray) -> np.ndarray:
        """Coordinates of an embedded vector (or columns) lying in the image."""
        return self.pivot_inv.dot(w[list(self.pivots)])

    def group_element(self, K) -> np.ndarray:
        """pi(K) for an invertible N x N matrix K."""
        K = np.asarray(K, dtype=object)
        n = self.n_boxes
        t = self.embedding.reshape((self.N,) * n + (self.dim,))
        for ax in range(n):
            t = np.moveaxis(np.tensordot(K, t, axes=([1], [ax])), 0, ax)
        return self.coords(t.reshape(self.N ** n, self.dim))


def _tensor_generator(N, n, i, j):
    """Sum over factors of E_ij acting on a sparse tensor-index dict."""
    def act(vec):
        out = {}
        for idx, c in vec.items():
            for b in range(n):
                if idx[b] == j:
                    new = idx[:b] + (i,) + idx[b + 1:]
                    out[new] = out.get(new, 0) + c
        return out
    return act


def _dense(vecs, N, n):
    out = np.empty((N ** n, len(vecs)), dtype=object)
    out.fill(mpq(0))
    for c, v in enumerate(vecs):
        for k, x in v.items():
            out[np.ravel_multi_index(k, (N,) * n), c] = mpq(x)
    return out


def _gt_basis_change(N, gens, patterns):
    """Columns: GT eigenvectors in the current basis, ordered like ``patterns``."""
    dim = gens[0][0].shape[0]
    eye = np.empty((dim, dim), dtype=object)
    eye.fill(mpq(0))
    for k in range(dim):
        eye[k, k] = mpq(1)

    @lru_cache(maxsize=None)
    def minor(rows, cols, u):
        # single site, theta = 0, hbar = 1: T_ij(u) = u delta_ij - E_ji
        if not rows:
            return eye
        acc = None
        for r, ri in enumerate(rows):
            t = -gens[cols[0]][ri] + (eye * u if ri == cols[0] else 0)
            term = t.dot(minor(rows[:r] + rows[r + 1:], cols[1:], u - 1))
            term = term if r % 2 == 0 else -term
            acc = term if acc is None else acc + term
        return acc

    samples = {a: [mpq(3 * s + 1, 7) for s in range(a + 1)] for a in range(1, N)}
    mats = {(a, u): minor(tuple(range(a)), tuple(range(a)), u + (a - 1))
            for a in range(1, N) for u in samples[a]}
    cols = []
    for pat in patterns:
        blocks = []
        for a in range(1, N):
            lam = pat.rows[a - 1]
            for u in samples[a]:
                ev = mpq(1)
                for k in range(1, a + 1):
                    ev *= u + (k - 1) - lam[k - 1]
                blocks.append(mats[(a, u)] - eye * ev)
        ns = linalg.nullspace(np.vstack(blocks)) if blocks else np.array([eye[:, 0]])
        if ns.shape[0] != 1:
            raise RuntimeError(f"GT eigenspace for {pat.rows} has dimension {ns.shape[0]}")
        cols.append(ns[0])
    return np.array(cols, dtype=object).T


@lru_cache(maxsize=None)
def build_rep(nu: tuple, N: int) -> Rep:
    """The gl(N) irrep of highest weight nu, in a GT basis."""
    shape = Partition(nu)
    if shape.height > N:
        raise ValueError("weight has more than N parts")
    n = shape.size
    _check_budget(n)
    patterns = tuple(enumerate_gt(shape.padded(N), N))
    dim = weyl_dim(shape.padded(N), N)
    if n == 0:
        one = np.array([[mpq(1)]], dtype=object)
        zero = np.array([[mpq(0)]], dtype=object)
        gens = tuple(tuple(zero for _ in range(N)) for _ in range(N))
        return Rep(N, shape, patterns, one, (0,), one, gens)
    # semistandard fillings give a spanning set of the projector image
    from .young import ssyt
    seeds = [tuple(v - 1 for v in t) for t in ssyt(shape, N)]
    vecs = [_young_apply(shape, {s: 1}) for s in seeds]
    V = _dense(vecs, N, n)
    if linalg.rank(V) != dim:
        raise RuntimeError("semistandard seeds do not span the irrep")
    pivots = tuple(linalg.independent_columns(V.T))
    Vinv = linalg.inv(V[list(pivots)])
    gens = []
    for i in range(N):
        row = []
        for j in range(N):
            act = _tensor_generator(N, n, i, j)
            W = _dense([act(v) for v in vecs], N, n)
            row.append(Vinv.dot(W[list(pivots)]))
        gens.append(row)
    Q = _gt_basis_change(N, gens, patterns)
    emb = V.dot(Q)
    # first nonzero embedded coordinate of each column is 1
    for c in range(dim):
        nz = next(r for r in range(emb.shape[0]) if emb[r, c] != 0)
        emb[:, c] = emb[:, c] / emb[nz, c]
    pivots = tuple(linalg.independent_columns(emb.T))
    pinv = linalg.inv(emb[list(pivots)])
    gt_gens = []
    for i in range(N):
        row = []
        for j in range(N):
            act = _tensor_generator(N, n, i, j)
            cols = [{tuple(np.unravel_index(r, (N,) * n)): emb[r, c]
                     for r in range(emb.shape[0]) if emb[r, c] != 0} for c in range(dim)]
            W = _dense([act(v) for v in cols], N, n)
            row.append(pinv.dot(W[list(pivots)]))
        gt_gens.append(tuple(row))
    return Rep(N, shape, patterns, emb, pivots, pinv, tuple(gt_gens))


def build_rect_rep(spec) -> Rep:
    return build_rep(tuple(spec.weight), spec.N)


def lws_vector(rep: Rep, L: int) -> np.ndarray:
    """L-fold tensor power of the single-site lowest-weight vector (one-hot)."""
    v = np.array([mpq(1)], dtype=object)
    site = rep.one_hot(rep.lws_index())
    for _ in range(L):
        v = np.kron(v, site)
    return v


def commutator_defect(rep: Rep):
    """Max defect of [E_ij, E_kl] = delta_jk E_il - delta_li E_kj."""
    N = rep.N
    worst = mpq(0)
    for i, j, k, l in itertools.product(range(N), repeat=4):
        lhs = rep.gens[i][j].dot(rep.gens[k][l]) - rep.gens[k][l].dot(rep.gens[i][j])
        rhs = (rep.gens[i][l] if j == k else 0) - (rep.gens[k][j] if l == i else 0)
        d = lhs - rhs
        if d.size:
            worst = max(worst, max(abs(x) for x in d.ravel()))
    return worst
