import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from glsov.boperator import build_B
from glsov.chain import ChainSpec
from glsov.qsystem import (_gamma, _merge, _shift, basis_pairing, degree_bookkeeping,
                           diagonalize_bethe, export_qsystems, generate_state, overlap_defect,
                           q_system, qq_levels, qq_residual, sigma_for_index, slater_wavefunction,
                           solve_q, b_product_state, wronskian_defect)
from glsov.scalars import mpq
from glsov.sov import build_sov_basis, default_sigma, omega_state
from glsov.transfer import fused_transfer, talalaev_minor_sum
from glsov.yangian import build_monodromy, companion_twist, quantum_minor

from test_yangian import direct_monodromy

CONFIGS = [dict(N=2, L=1), dict(N=2, L=2), dict(N=3, L=2), dict(N=2, L=2, S=2),
           dict(N=3, L=1, S=2), dict(N=3, L=2, A=2)]


@pytest.fixture(scope="module", params=range(len(CONFIGS)), ids=lambda i: str(CONFIGS[i]))
def solved(request):
    spec = ChainSpec(**CONFIGS[request.param])
    m = build_monodromy(spec)
    eig = diagonalize_bethe(m, seed=1)
    return m, eig, [q_system(e, spec) for e in eig]


def test_one_state_per_dimension(solved):
    m, eig, _ = solved
    assert len(eig) == m.dim
    V = np.array([e.vector for e in eig]).T
    assert np.linalg.matrix_rank(V, tol=1e-8) == m.dim


def test_eigenvectors_of_companion_transfer(solved):
    m, eig, _ = solved
    G = companion_twist(m.spec.z)
    for u in (mpq(1, 3), mpq(-2)):
        T = np.array(fused_transfer(m, G, (1,), u), dtype=complex)
        for e in eig:
            v = e.vector
            r = np.linalg.norm(T @ v - e.t[1](complex(u)) * v) / (np.linalg.norm(T, 2) * np.linalg.norm(v))
            assert r < 1e-10


@pytest.mark.parametrize("N,L", [(2, 1), (2, 2), (3, 2)])
def test_spectrum_matches_direct_product(N, L):
    spec = ChainSpec(N, L)
    eig = diagonalize_bethe(spec)
    th = [float(t) for t in spec.theta]
    z = np.array([float(v) for v in spec.z])
    for u in (0.4, -1.1):
        T = direct_monodromy(u, th, N)
        tr = sum(z[i] * T[i, i] for i in range(N))
        want = np.sort_complex(np.linalg.eigvals(tr))
        got = np.sort_complex(np.array([e.t[1](u) for e in eig]))
        assert np.allclose(got, want, atol=1e-9)


def test_top_eigenvalue_is_quantum_determinant(solved):
    m, eig, _ = solved
    N = m.N
    u = mpq(5, 7)
    qd = complex(quantum_minor(m, tuple(range(1, N + 1)), tuple(range(1, N + 1)), u)[0, 0])
    detz = complex(np.prod([complex(v) for v in m.spec.z]))
    for e in eig:
        assert abs(e.t[N](complex(u)) - detz * qd) < 1e-9 * abs(detz * qd)


def test_wronskian_and_qq(solved):
    _, eig, qs = solved
    for e, q in zip(eig, qs):
        assert wronskian_defect(q, e) < 1e-8
        assert qq_residual(q) < 1e-8
        levels, res = qq_levels(q)
        assert res["top_degree"] == 0
        assert all(p.lead == pytest.approx(1) for p in levels.values())


def test_degree_bookkeeping(solved):
    m, eig, qs = solved
    for e, q in zip(eig, qs):
        assert degree_bookkeeping(m, e, q)


def test_degree_zero_means_omega(solved):
    m, eig, qs = solved
    spec = m.spec
    if spec.rect_AS[0] != 1:
        pytest.skip("extremal vectors Omega_i are indexed by directions for A = 1")
    for i in range(1, spec.N + 1):
        omega, _ = omega_state(sigma_for_index(i, spec.N), spec, m.rep)
        hits = [k for k, q in enumerate(qs) if q.q[i - 1].degree == 0]
        assert len(hits) == 1
        assert overlap_defect(np.array(omega, dtype=complex), eig[hits[0]].vector) < 1e-10


def test_wavefunction_factorises(solved):
    m, eig, qs = solved
    basis = build_sov_basis(m)
    I = tuple(range(m.spec.rect_AS[0]))
    for e, q in zip(eig, qs):
        assert slater_wavefunction(q, basis.tuples[0], I) == 1
        pair = basis_pairing(basis, e.vector)
        sl = np.array([slater_wavefunction(q, t, I) for t in basis.tuples])
        r = pair / sl
        assert np.max(np.abs(r - r[0])) < 1e-9 * abs(r[0])
        tau = generate_state(q, default_sigma(m.N), I, basis, m.rep)
        assert overlap_defect(tau, e.vector) < 1e-10
        assert abs(basis_pairing(basis, tau)[0] - 1) < 1e-10


def test_b_products_reproduce_states(solved):
    m, eig, qs = solved
    if m.spec.rect_AS[0] != 1:
        with pytest.raises(ValueError):
            b_product_state(qs[0], 1, build_B(m), m.rep)
        return
    b = build_B(m)
    for e, q in zip(eig, qs):
        for i in range(1, m.N + 1):
            assert overlap_defect(b_product_state(q, i, b, m.rep), e.vector) < 1e-9


def test_sigma_for_index():
    assert sigma_for_index(1, 3) == (1, 2, 3)
    assert sigma_for_index(3, 3) == (3, 2, 1)


def test_solve_q_rejects_zero_twist():
    spec = ChainSpec(2, 1, z=[0, 3])
    eig = diagonalize_bethe(ChainSpec(2, 1))
    with pytest.raises(ValueError):
        solve_q(eig[0], 1, spec)


shift_dicts = st.dictionaries(st.integers(-3, 3), st.integers(-2, 2), max_size=4).filter(
    lambda d: sum(d.values()) == 0)


@given(shift_dicts)
def test_gamma_telescopes(d):
    # Gamma[R](u) / Gamma[R](u - hbar) = R(u - hbar), in shift-exponent form
    d = {c: e for c, e in d.items() if e}
    g = _gamma(d)
    ratio = _merge(g, {c: -e for c, e in _shift(g, 1).items()})
    assert ratio == _shift(d, 1)


def test_gamma_needs_degree_zero():
    with pytest.raises(ValueError):
        _gamma({0: 1})


def test_export_roundtrip(solved):
    _, eig, qs = solved
    data = json.loads(export_qsystems([(q, {"wronskian": 0.0}) for q in qs]))
    assert len(data) == len(qs)
    assert set(data[0]["q"]) == {str(i + 1) for i in range(len(qs[0].z))}
