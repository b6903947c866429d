"""The B-operator in the companion frame, its GT counterpart and the spectrum prediction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .poly import Poly, q_theta
from .scalars import max_abs, mpq
from .yangian import Monodromy, OperatorPoly, quantum_minor
from .young import enumerate_gt


def _chains(N):
    """Sequences k_1, ..., k_{N-2} of increasing n-subsets of {1..N-1}."""
    levels = [list(itertools.combinations(range(1, N), n)) for n in range(1, N - 1)]
    return itertools.product(*levels)


def b_raw(m: Monodromy, u):
    """Unnormalised sum_k T[k1;1](u) T[k2;1,k1+1](u+h) ... T[1..N-1;1,k_{N-2}+1](u+h(N-2))."""
    N, h = m.N, m.hbar
    u = m.ring.scalar(u)
    if N == 1:
        return m.eye()
    acc = m.zero()
    top = tuple(range(1, N))
    for ks in _chains(N):
        prev = ()
        prod = None
        for n, k in enumerate(list(ks) + [top]):
            cols = (1,) + tuple(c + 1 for c in prev)
            f = quantum_minor(m, k, cols, u + h * n)
            prod = f if prod is None else prod.dot(f)
            prev = k
        acc = acc + prod
    return acc


def b_raw_n3(m: Monodromy, u):
    """Explicit N = 3 form T[1;1] T^[2][12;12] + T[2;1] T^[2][12;13]."""
    if m.N != 3:
        raise ValueError("explicit form is for N = 3")
    h = m.hbar
    u = m.ring.scalar(u)
    return (quantum_minor(m, (1,), (1,), u).dot(quantum_minor(m, (1, 2), (1, 2), u + h))
            + quantum_minor(m, (2,), (1,), u).dot(quantum_minor(m, (1, 2), (1, 3), u + h)))


def bgt_raw(m: Monodromy, u):
    """T[1;1](u) T[12;12](u+h) ... T[1..N-1;1..N-1](u+h(N-2))."""
    h = m.hbar
    u = m.ring.scalar(u)
    acc = m.eye()
    for n in range(1, m.N):
        idx = tuple(range(1, n + 1))
        acc = acc.dot(quantum_minor(m, idx, idx, u + h * (n - 1)))
    return acc


def b_degree(spec) -> int:
    return spec.L * spec.N * (spec.N - 1) // 2


def _monic(op: OperatorPoly) -> tuple:
    lead = op.lead()
    c = lead[0, 0]
    if c == 0 or not op.ring.is_zero(max_abs(lead - op.ring.eye(op.dim) * c), 1.0):
        raise ValueError("leading coefficient is not a nonzero multiple of the identity")
    inv = (mpq(1) / c) if op.ring.exact else 1 / c
    return op.scaled(inv), inv


def beta_prefactor(spec) -> Poly:
    """Scalar roots of B: prod over sites of the two displayed double products."""
    if not spec.rectangular:
        return Poly([1])
    A, S = spec.rect_AS
    N, h = spec.N, spec.hbar
    out = Poly([1])
    for th in spec.theta:
        for i in range(1, A):
            for j in range(1, i + 1):
                out = out * Poly([-(th + h * (S - j + 1)), 1])
        for i in range(1, N - A):
            for j in range(1, i + 1):
                out = out * Poly([-(th - h * (A + j - 1)), 1])
    return out


def divide_operator_poly(op: OperatorPoly, p: Poly) -> tuple:
    """Long division of an OperatorPoly by a scalar Poly: (quotient, remainder)."""
    rem = [c.copy() for c in op.coeffs]
    dq = p.degree
    if dq < 0:
        raise ZeroDivisionError("division by the zero polynomial")
    lead = p.lead
    conv = (lambda x: x) if op.ring.exact else complex
    nq = max(len(rem) - dq, 1)
    quot = [op.ring.zeros((op.dim, op.dim)) for _ in range(nq)]
    for k in range(len(rem) - dq - 1, -1, -1):
        c = rem[k + dq] * conv(1 / lead if not op.ring.exact else mpq(1) / lead)
        quot[k] = c
        for i, b in enumerate(p.coeffs):
            rem[k + i] = rem[k + i] - c * conv(b)
    remainder = rem[:dq] if dq else [op.ring.zeros((op.dim, op.dim))]
    return OperatorPoly(quot, op.ring), OperatorPoly(remainder, op.ring)


@dataclass
class BOperator:
    full: OperatorPoly        # monic B(u)
    beta: Poly
    dynamical: OperatorPoly   # b(u) with B = beta * b
    scale: object             # B = scale * raw sum

    def __call__(self, u):
        return self.full(u)


def build_B(m: Monodromy) -> BOperator:
    """Monic B(u) from the bare monodromy, with its beta / b split."""
    if m.K1 is not None or m.K2 is not None:
        raise ValueError("B is assembled from the bare monodromy")
    deg = b_degree(m.spec)
    raw = OperatorPoly.from_samples(lambda u: b_raw(m, u), deg, m.ring)
    if raw.degree != deg:
        raise ValueError(f"B has degree {raw.degree}, expected {deg}")
    full, scale = _monic(raw)
    beta = beta_prefactor(m.spec)
    dyn, rem = divide_operator_poly(full, beta)
    scale = max(max_abs(c) for c in full.coeffs)
    if not m.ring.is_zero(max(max_abs(c) for c in rem.coeffs), scale):
        raise ArithmeticError("B is not divisible by beta")
    return BOperator(full, beta, dyn, scale)


def build_BGT(m: Monodromy) -> OperatorPoly:
    deg = b_degree(m.spec)
    raw = OperatorPoly.from_samples(lambda u: bgt_raw(m, u), deg, m.ring)
    return _monic(raw)[0]


def gt_b_eigenvalue(pattern_tuple, spec, u):
    """prod over sites and nodes (k < N) of (u - theta_a - hbar(lambda_ki - i + 1))."""
    out = 1
    h = spec.hbar
    for th, pat in zip(spec.theta, pattern_tuple):
        for k in range(1, spec.N):
            for i, lam in enumerate(pat.rows[k - 1], start=1):
                out = out * (u - th - h * (lam - i + 1))
    return out


def predicted_b_spectrum(spec, u) -> list:
    pats = enumerate_gt(spec.weight, spec.N)
    return [gt_b_eigenvalue(t, spec, u) for t in itertools.product(pats, repeat=spec.L)]


def charpoly_from_roots(roots) -> list:
    p = Poly([1])
    for r in roots:
        p = p * Poly([-r, 1])
    return list(p.coeffs)


@dataclass
class SpectrumReport:
    points: list
    matched: int
    unmatched: int
    total: int

    @property
    def ok(self) -> bool:
        return self.unmatched == 0


def spectrum_check(b: BOperator, spec, points) -> SpectrumReport:
    """Compare char-polys of B(u0) with the GT prediction at each point.

    ``matched`` counts predicted eigenvalues matched at every point; an exact
    char-poly match matches all of them, otherwise float roots are paired.
    """
    total = None
    worst_bad = 0
    for u in points:
        u = spec.ring.scalar(u)
        pred = predicted_b_spectrum(spec, u)
        total = len(pred)
        got = linalg.charpoly(b(u))
        want = charpoly_from_roots(pred)
        if spec.ring.exact:
            ok = list(got) == want
        else:
            ok = np.allclose(np.array(got, complex), np.array(want, complex), rtol=1e-8, atol=1e-8)
        if not ok:
            r_got = list(np.linalg.eigvals(np.array(b(u), dtype=complex)))
            bad = 0
            for w in np.array(pred, dtype=complex):
                k = int(np.argmin([abs(g - w) for g in r_got]))
                if abs(r_got[k] - w) > 1e-6 * (1 + abs(w)):
                    bad += 1
                else:
                    r_got.pop(k)
            worst_bad = max(worst_bad, max(bad, 1))
    total = total or 0
    return SpectrumReport([str(p) for p in points], total - worst_bad, worst_bad, total)
