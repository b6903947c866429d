"""Separated-variable covector basis: GT vacuum, <Lambda|, normalised <x| and reference states."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .boperator import BOperator
from .chain import ChainSpec
from .glrep import Rep
from .poly import q_theta
from .scalars import fmt_scalar, max_abs, mpq
from .transfer import fused_transfer, slater_phi
from .yangian import Monodromy, companion_twist, quantum_minor
from .young import Partition, RectPattern, enumerate_gt, enumerate_tuples, predicted_x, schur


@dataclass
class Covector:
    coords: np.ndarray
    label: Optional[tuple] = None

    def __post_init__(self):
        if not np.any(self.coords != 0):
            raise ValueError("zero covector")

    def act(self, op) -> np.ndarray:
        return self.coords.dot(op)

    def pair(self, vec) -> object:
        return self.coords.dot(vec)


def _site_index(rep: Rep, idx: int, L: int) -> int:
    out = 0
    for _ in range(L):
        out = out * rep.dim + idx
    return out


def gt_vacuum_dual(rep: Rep, spec: ChainSpec) -> Covector:
    """One-hot covector dual to the lowest-weight state of the chain."""
    D = rep.dim ** spec.L
    v = spec.ring.zeros(D)
    v[_site_index(rep, rep.lws_index(), spec.L)] = spec.ring.scalar(1)
    return Covector(v, None)


class TransferCache:
    """Memoised T_mu^G(theta_alpha) operators for one monodromy and twist."""

    def __init__(self, m: Monodromy, G):
        self.m = m
        self.G = m.ring.asarray(G)
        self._ops = {}

    def op(self, mu: Partition, alpha: int):
        key = (mu.parts, alpha)
        if key not in self._ops:
            self._ops[key] = fused_transfer(self.m, self.G, mu, self.m.spec.theta[alpha])
        return self._ops[key]


def lambda_factors(t: Sequence[RectPattern]) -> list:
    """(alpha, mu) factors of <Lambda|, rows k = N-A .. 1 (largest diagrams first)."""
    out = []
    if not t:
        return out
    for k in reversed(range(len(t[0].m))):
        for alpha, pat in enumerate(t):
            mu = pat.rows[k]
            if mu.size:
                out.append((alpha, mu))
    return out


def build_lambda(vac: Covector, t, tc: TransferCache, order: Optional[Sequence[int]] = None) -> Covector:
    """<Lambda| = <0| prod_{alpha,k} T_{mu_k^alpha}(theta_alpha); factors commute."""
    facs = lambda_factors(t)
    if order is not None:
        facs = [facs[i] for i in order]
    c = vac.coords
    for alpha, mu in facs:
        c = c.dot(tc.op(mu, alpha))
    if not np.any(c != 0):
        raise ValueError(f"<Lambda| vanishes for {t}: non-generic spec")
    return Covector(c, tuple(t))


def phi_factor(t, spec: ChainSpec):
    out = spec.ring.scalar(1)
    for alpha, pat in enumerate(t):
        for mu in pat.rows:
            out = out * slater_phi(spec, mu, alpha)
    return out


def normalize_x(c: Covector, t, spec: ChainSpec) -> Covector:
    """<x| = <Lambda| / prod Phi."""
    phi = phi_factor(t, spec)
    if phi == 0:
        raise ZeroDivisionError("Phi vanishes: non-generic theta")
    inv = (mpq(1) / phi) if spec.ring.exact else 1 / phi
    return Covector(c.coords * inv, c.label)


@dataclass
class SoVBasis:
    spec: ChainSpec
    tuples: list
    entries: dict = field(default_factory=dict)
    normalized: dict = field(default_factory=dict)

    def matrix(self, normalized: bool = False) -> np.ndarray:
        src = self.normalized if normalized else self.entries
        return np.array([src[t].coords for t in self.tuples], dtype=object if self.spec.ring.exact else complex)

    def rank(self) -> int:
        return linalg.rank(self.matrix())

    def to_json(self) -> str:
        rows = []
        for t in self.tuples:
            rows.append({
                "pattern": [[list(r) for r in p.m] for p in t],
                "covector": [fmt_scalar(x) for x in self.entries[t].coords],
                "normalized": [fmt_scalar(x) for x in self.normalized[t].coords],
            })
        return json.dumps({"spec": self.spec.to_dict(), "basis": rows})


def build_sov_basis(m: Monodromy, G=None) -> SoVBasis:
    spec = m.spec
    if not spec.rectangular:
        raise ValueError("the SoV basis is built for rectangular representations")
    A, S = spec.rect_AS
    G = companion_twist(spec.z) if G is None else G
    tc = TransferCache(m, G)
    vac = gt_vacuum_dual(m.rep, spec)
    basis = SoVBasis(spec, enumerate_tuples(spec.N, A, S, spec.L))
    for t in basis.tuples:
        c = build_lambda(vac, t, tc)
        basis.entries[t] = c
        basis.normalized[t] = normalize_x(c, t, spec)
    return basis


def b_eigen_residual(basis: SoVBasis, b: BOperator, points) -> object:
    """max over tuples and points of |<Lambda| b(u) - b_Lambda(u) <Lambda||."""
    worst = mpq(0) if basis.spec.ring.exact else 0.0
    for u in points:
        bu = b.dynamical(basis.spec.ring.scalar(u))
        for t in basis.tuples:
            c = basis.entries[t].coords
            _, bp = predicted_x(t, basis.spec)
            worst = max(worst, max_abs(c.dot(bu) - c * bp(u)))
    return worst


def twist_independence_check(m: Monodromy, z_alt: Sequence) -> dict:
    """Compare every <Lambda| built with z, with z_alt and with the null twist."""
    spec = m.spec
    ring = spec.ring
    ref = build_sov_basis(m, companion_twist(spec.z))
    worst = mpq(0) if ring.exact else 0.0
    for zz in (list(z_alt), [0] * spec.N):
        other = build_sov_basis(m, companion_twist([ring.scalar(v) for v in zz]))
        for t in ref.tuples:
            worst = max(worst, max_abs(ref.entries[t].coords - other.entries[t].coords))
    return {"count": len(ref.tuples), "max_difference": worst, "ok": ring.is_zero(worst)}


def vandermonde_K(z: Sequence, ring) -> np.ndarray:
    """K_ij = z_j^{N-i}; K diag(z) K^-1 is the companion twist."""
    N = len(z)
    K = ring.zeros((N, N))
    for i in range(N):
        for j in range(N):
            K[i, j] = ring.scalar(z[j]) ** (N - 1 - i)
    return K


def default_sigma(N: int) -> tuple:
    return tuple(N - i for i in range(N))


def extremal_index(rep: Rep, weight: Sequence[int]) -> int:
    hits = [i for i, p in enumerate(rep.patterns) if p.weight() == tuple(weight)]
    if len(hits) != 1:
        raise ValueError(f"weight {tuple(weight)} is not extremal in this irrep")
    return hits[0]


def omega_state(sigma: Sequence[int], spec: ChainSpec, rep: Rep, normalise: bool = True):
    """Pi(K) applied to the sigma-permuted extremal weight vector, with <0|Omega> = 1.

    Returns (vector, raw overlap with the GT vacuum).
    """
    z = spec.z
    if len(set(z)) != len(z):
        raise ValueError("coincident twist eigenvalues: K is singular")
    nu = spec.weight
    w = tuple(nu[s - 1] for s in sigma)
    e = rep.one_hot(extremal_index(rep, w))
    K = vandermonde_K(z, spec.ring)
    PK = spec.ring.asarray(rep.group_element(K)) if spec.ring.exact else rep.group_element(
        np.array(K, dtype=object)).astype(complex)
    site = PK.dot(spec.ring.asarray(e))
    v = np.array([spec.ring.scalar(1)], dtype=object if spec.ring.exact else complex)
    for _ in range(spec.L):
        v = np.kron(v, site)
    vac = gt_vacuum_dual(rep, spec)
    ov = vac.pair(v)
    if normalise:
        if ov == 0:
            raise ZeroDivisionError("<0|Omega> vanishes")
        v = v * ((mpq(1) / ov) if spec.ring.exact else 1 / ov)
    return v, ov


def omega_overlap_prediction(spec: ChainSpec):
    """(prod_{N-A+1 <= i < j <= N} (z_i - z_j))^{L S} for the default sigma."""
    A, S = spec.rect_AS
    N, z = spec.N, spec.z
    pr = spec.ring.scalar(1)
    for i in range(N - A + 1, N + 1):
        for j in range(i + 1, N + 1):
            pr = pr * (z[i - 1] - z[j - 1])
    return pr ** (spec.L * S)


def sigma_inverse(sigma):
    return tuple(sigma.index(j) + 1 for j in range(1, len(sigma) + 1))


def omega_eigen_residual(m: Monodromy, sigma, omega, points) -> object:
    """In the frame K^-1 T K diag(z): T_jj |Omega_sigma> = z_j Q_theta(u - hbar nu_sigma(j)) |Omega_sigma>."""
    spec = m.spec
    ring = spec.ring
    K = vandermonde_K(spec.z, ring)
    Z = ring.zeros((spec.N, spec.N))
    for i, v in enumerate(spec.z):
        Z[i, i] = v
    mt = m.twisted(K.dot(Z), linalg.inv(K))
    Qt = q_theta(spec.theta)
    nu = spec.weight
    worst = mpq(0) if ring.exact else 0.0
    for u in points:
        u = ring.scalar(u)
        for j in range(1, spec.N + 1):
            ev = spec.z[j - 1] * Qt(u - spec.hbar * nu[sigma[j - 1] - 1])
            worst = max(worst, max_abs(mt.T(j, j, u).dot(omega) - omega * ev))
    return worst


def schur_overlap_prediction(t, spec: ChainSpec, sigma):
    """prod over sites and rows of chi_mu(z_{sigma^-1(1)}, ..., z_{sigma^-1(A)})."""
    A, _ = spec.rect_AS
    si = sigma_inverse(tuple(sigma))
    zs = [spec.z[si[j] - 1] for j in range(A)]
    out = spec.ring.scalar(1)
    for pat in t:
        for mu in pat.rows:
            out = out * schur(mu, zs)
    return out


# shortening conditions -------------------------------------------------------

def vacuum_residuals(m: Monodromy, vac: Covector, points) -> dict:
    """Diagonal eigenvalues, lowest-weight annihilation and shortening on <0|."""
    spec = m.spec
    A, S = spec.rect_AS
    N, h = spec.N, spec.hbar
    Qt = q_theta(spec.theta)
    zero = mpq(0) if spec.ring.exact else 0.0
    out = {"diagonal": zero, "lowest_weight": zero, "shortening": zero, "generalised": zero}
    for u in points:
        u = spec.ring.scalar(u)
        for j in range(1, N + 1):
            ev = Qt(u) if j <= N - A else Qt(u - h * S)
            out["diagonal"] = max(out["diagonal"], max_abs(vac.act(m.T(j, j, u)) - vac.coords * ev))
            for k in range(1, N + 1):
                r = vac.act(m.T(k, j, u))
                if j < k:
                    out["lowest_weight"] = max(out["lowest_weight"], max_abs(r))
            for k in range(j + 1, N - A + 1):
                out["shortening"] = max(out["shortening"], max_abs(vac.act(m.T(j, k, u))))
        out["generalised"] = max(out["generalised"], shortening_residual(m, vac.coords, N - A, u))
    return out


def shortening_residual(m: Monodromy, c, n: int, u):
    """max |<Psi| T_jk(u) - delta_jk Q_theta(u) <Psi||, 1 <= k <= n, all j."""
    Qt = q_theta(m.spec.theta)
    worst = mpq(0) if m.ring.exact else 0.0
    for k in range(1, n + 1):
        for j in range(1, m.N + 1):
            r = c.dot(m.T(j, k, u))
            if j == k:
                r = r - c * Qt(u)
            worst = max(worst, max_abs(r))
    return worst


def empty_site_residual(m: Monodromy, c, n: int, sites) -> object:
    """max |<Psi| T_jk(theta_beta)|, 1 <= k <= n + 1, all j, beta in ``sites``."""
    worst = mpq(0) if m.ring.exact else 0.0
    for beta in sites:
        th = m.spec.theta[beta]
        for k in range(1, min(n + 1, m.N) + 1):
            for j in range(1, m.N + 1):
                worst = max(worst, max_abs(c.dot(m.T(j, k, th))))
    return worst


def shortening_suite(m: Monodromy, G, steps: Sequence[Sequence[Partition]], points) -> dict:
    """Walk <Psi_n| from n = N-A down, one site at a time, checking every condition.

    ``steps[r][alpha]`` is the diagram applied at site alpha in step r.
    Checked along the way: the partial-product shortening for k <= n, the
    empty-site conditions for k <= n+1, twist independence against the null
    twist, and the final generalised shortening and empty-site conditions.
    """
    spec = m.spec
    A, _ = spec.rect_AS
    N, L = spec.N, spec.L
    tc = TransferCache(m, G)
    tn = TransferCache(m, companion_twist([spec.ring.scalar(0)] * N))
    vac = gt_vacuum_dual(m.rep, spec)
    zero = mpq(0) if spec.ring.exact else 0.0
    rep = {"vacuum": vacuum_residuals(m, vac, points), "partial": zero, "empty_site": zero,
           "twist": zero, "final": zero, "steps": 0}
    psi = vac.coords
    n = N - A
    for step in steps:
        if n == 0:
            raise ValueError("more steps than N - A")
        n -= 1
        used = []
        cur, cur_null = psi, psi
        for alpha in range(L):
            mu = step[alpha]
            if mu.size:
                cur = cur.dot(tc.op(mu, alpha))
                cur_null = cur_null.dot(tn.op(mu, alpha))
            used.append(alpha)
            rep["twist"] = max(rep["twist"], max_abs(cur - cur_null))
            for u in points:
                rep["partial"] = max(rep["partial"], shortening_residual(m, cur, n, spec.ring.scalar(u)))
            rest = [b for b in range(L) if b not in used]
            rep["empty_site"] = max(rep["empty_site"], empty_site_residual(m, cur, n, rest))
        empties = [a for a in range(L) if step[a].size == 0]
        rep["empty_site"] = max(rep["empty_site"], empty_site_residual(m, cur, n, empties))
        for u in points:
            rep["final"] = max(rep["final"], shortening_residual(m, cur, n, spec.ring.scalar(u)))
        psi = cur
        rep["steps"] += 1
    return rep


def n2_ladder_check(m: Monodromy, G=None) -> dict:
    """<0| T_{1,s}(theta) = <0| T_12(theta) ... T_12(theta + hbar(s-1)) for s <= S, N = 2."""
    spec = m.spec
    if spec.N != 2:
        raise ValueError("ladder identities are for N = 2")
    A, S = spec.rect_AS
    G = companion_twist(spec.z) if G is None else G
    vac = gt_vacuum_dual(m.rep, spec)
    h = spec.hbar
    worst = mpq(0) if spec.ring.exact else 0.0
    second = worst
    for alpha, th in enumerate(spec.theta):
        for s in range(0, S + 1):
            rhs = vac.coords
            for r in range(s):
                rhs = rhs.dot(m.T(1, 2, th + h * r))
            lhs = vac.act(fused_transfer(m, G, Partition([s]), th))
            worst = max(worst, max_abs(lhs - rhs))
        if S >= 2:
            t11 = fused_transfer(m, G, Partition([1]), th)
            t11b = fused_transfer(m, G, Partition([1]), th + h)
            t21 = fused_transfer(m, G, Partition([1, 1]), th + h)
            two = vac.act(t11.dot(t11b) - t21)
            second = max(second, max_abs(two - vac.act(fused_transfer(m, G, Partition([2]), th))))
    return {"ladder": worst, "second_level": second}


def tb_factor(shape: Partition, u, theta, hbar):
    out = 1
    for a in range(1, shape.height + 1):
        out = out * (u - theta + hbar * (a - 1 - shape[a - 1])) / (u - theta + hbar * (a - 1))
    return out


def tb_residual(m: Monodromy, b: BOperator, G, shape: Partition, u, alpha: int, covector) -> object:
    """|<Psi|[T_lambda(theta) B(u) - f(u) B(u) T_lambda(theta)]| with the scalar exchange factor f."""
    spec = m.spec
    th = spec.theta[alpha]
    pre = max(max_abs(covector.dot(m.T(j, 1, th))) for j in range(1, spec.N + 1))
    if not spec.ring.is_zero(pre):
        raise ValueError("covector does not annihilate T_j1(theta_alpha)")
    u = spec.ring.scalar(u)
    T = fused_transfer(m, G, shape, th)
    B = b(u)
    f = tb_factor(shape, u, th, spec.hbar)
    return max_abs(covector.dot(T.dot(B)) - covector.dot(B.dot(T)) * f)


def gt_yangian_eigencheck(m: Monodromy, seed: int = 0) -> dict:
    """Joint spectrum of the leading principal minors against GT pattern tuples (float)."""
    spec = m.spec
    N, L, h = spec.N, spec.L, spec.hbar
    rng = np.random.default_rng(seed)
    if spec.ring.exact:
        pts = {a: [mpq(3 + 4 * r, 10) for r in range(a * L + 1)] for a in range(1, N + 1)}
    else:
        pts = {a: [complex(0.3 + 0.41 * r, 0.07 * r) for r in range(a * L + 1)] for a in range(1, N + 1)}
    mats = {}
    for a in range(1, N + 1):
        idx = tuple(range(1, a + 1))
        for u in pts[a]:
            mats[(a, u)] = np.array(quantum_minor(m, idx, idx, u + h * (a - 1)), dtype=complex), u
    combo = sum(rng.normal() * v[0] for v in mats.values())
    _, V = np.linalg.eig(combo)
    pats = enumerate_gt(spec.weight, N)
    tuples = list(itertools.product(pats, repeat=L))

    def predicted(t, a, uu):
        out = 1
        for th, p in zip(spec.theta, t):
            for k in range(1, a + 1):
                out *= complex(uu) + complex(h) * (k - 1) - complex(th) - complex(h) * p.node(a, k)
        return out

    table = np.array([[predicted(t, a, mats[(a, u)][1]) for a in range(1, N + 1) for u in pts[a]]
                      for t in tuples])
    used, worst = set(), 0.0
    for c in range(V.shape[1]):
        v = V[:, c]
        piv = int(np.argmax(np.abs(v)))
        meas = np.array([(mats[(a, u)][0] @ v)[piv] / v[piv] for a in range(1, N + 1) for u in pts[a]])
        d = np.max(np.abs(table - meas) / (1 + np.abs(table)), axis=1)
        best = int(np.argmin(d))
        worst = max(worst, float(d[best]))
        used.add(best)
    return {"states": V.shape[1], "distinct_matches": len(used), "worst_relative_error": worst,
            "ok": len(used) == len(tuples) == V.shape[1] and worst < 1e-8}
