import itertools

import numpy as np
import pytest

from glsov import linalg
from glsov.boperator import (b_degree, b_raw, b_raw_n3, beta_prefactor, build_B, build_BGT,
                             divide_operator_poly, gt_b_eigenvalue, spectrum_check)
from glsov.chain import ChainSpec
from glsov.poly import Poly
from glsov.scalars import EXACT_RING, max_abs, mpq
from glsov.yangian import OperatorPoly, build_monodromy, companion_twist
from glsov.young import enumerate_gt

CONFIGS = [dict(N=2, L=2, S=1), dict(N=3, L=2), dict(N=3, L=1, A=2), dict(N=2, L=2, S=2),
           dict(N=3, L=1, S=2), dict(N=4, L=1)]


@pytest.fixture(scope="module", params=range(len(CONFIGS)), ids=lambda i: str(CONFIGS[i]))
def mb(request):
    m = build_monodromy(ChainSpec(**CONFIGS[request.param]))
    return m, build_B(m)


def test_monic_of_expected_degree(mb):
    m, b = mb
    assert b.full.degree == b_degree(m.spec)
    assert max_abs(b.full.lead() - m.eye()) == 0


def test_commuting_family(mb):
    m, b = mb
    x, y = b(mpq(1, 3)), b(mpq(-5, 2))
    assert max_abs(x.dot(y) - y.dot(x)) == 0


def test_beta_divides_and_its_roots_kill_B(mb):
    m, b = mb
    lhs = OperatorPoly([c * 1 for c in b.dynamical.coeffs], m.ring)
    for u in (mpq(2, 7), mpq(4)):
        assert max_abs(lhs(u) * b.beta(u) - b(u)) == 0
    for r in b.beta.roots() if b.beta.degree > 0 else []:
        # roots of beta are rational here
        rr = mpq(round(r.real * 630), 630)
        assert max_abs(b(rr)) == 0


def test_isospectral_with_gt_minor_product(mb):
    m, b = mb
    gt = build_BGT(m)
    u = mpq(7, 3)
    assert linalg.charpoly(b(u)) == linalg.charpoly(gt(u))


def test_gt_minor_product_triangular_in_gt_basis(mb):
    m, _ = mb
    spec = m.spec
    pats = enumerate_gt(spec.weight, spec.N)
    u = mpq(5, 4)
    M = build_BGT(m)(u)
    want = [gt_b_eigenvalue(t, spec, u) for t in itertools.product(pats, repeat=spec.L)]
    assert list(np.diag(M)) == want
    assert all(M[i, j] == 0 for i in range(m.dim) for j in range(i))


def test_spectrum_against_gt_prediction(mb):
    m, b = mb
    rep = spectrum_check(b, m.spec, [mpq(1, 2), mpq(-3, 5)])
    assert rep.ok and rep.matched == rep.total == m.dim


def test_explicit_n3_form(defining_m):
    for u in (mpq(1, 2), mpq(-4, 3)):
        assert max_abs(b_raw(defining_m, u) - b_raw_n3(defining_m, u)) == 0
    with pytest.raises(ValueError):
        b_raw_n3(build_monodromy(ChainSpec(2, 1)), mpq(1))


def test_n2_reduces_to_entry():
    m = build_monodromy(ChainSpec(2, 2))
    u = mpq(3, 8)
    assert max_abs(b_raw(m, u) - m.T(1, 1, u)) == 0


def test_beta_trivial_for_a1_n2():
    assert beta_prefactor(ChainSpec(2, 3)) == Poly([1])
    assert beta_prefactor(ChainSpec(3, 2)).degree == 2
    assert beta_prefactor(ChainSpec(4, 1, A=2)).degree == 2


def test_operator_division_roundtrip():
    ring = EXACT_RING
    M = [ring.asarray(np.array([[mpq(i + j + k) for j in range(2)] for i in range(2)], dtype=object))
         for k in range(4)]
    op = OperatorPoly(M, ring)
    p = Poly([mpq(-1), mpq(0), mpq(1)])
    q, r = divide_operator_poly(op, p)
    u = mpq(5, 3)
    assert max_abs(q(u) * p(u) + r(u) - op(u)) == 0
    assert r.degree < 2


def test_requires_bare_monodromy(defining_m):
    with pytest.raises(ValueError):
        build_B(defining_m.twisted(companion_twist([mpq(2), mpq(3), mpq(5)])))
