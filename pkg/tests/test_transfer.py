import numpy as np
import pytest

from glsov.chain import ChainSpec
from glsov.scalars import max_abs, mpq
from glsov.transfer import (calibration_ratio, fused_transfer, fused_transfer_ssyt,
                            hirota_residual, null_twist, talalaev_expand, talalaev_minor_sum,
                            talalaev_polys)
from glsov.yangian import build_monodromy, companion_twist
from glsov.young import Partition, schur

Z = [mpq(2), mpq(3), mpq(5)]


@pytest.fixture(scope="module")
def G():
    return companion_twist(Z)


@pytest.mark.parametrize("shape", [(1,), (2,), (1, 1), (2, 1), (3,), (1, 1, 1)])
def test_empty_chain_gives_character(shape):
    m = build_monodromy(ChainSpec(3, 0))
    D = np.diag(Z)
    val = fused_transfer(m, D, shape, mpq(1))[0, 0]
    assert val == schur(Partition(shape), Z)
    assert fused_transfer(m, companion_twist(Z), shape, mpq(4))[0, 0] == val


def test_single_box_is_twisted_trace(defining_m, G):
    u = mpq(3, 4)
    T = defining_m.at(u)
    want = sum((T[i][j] * G[j, i] for i in range(3) for j in range(3)), defining_m.zero())
    assert max_abs(fused_transfer(defining_m, G, (1,), u) - want) == 0


@pytest.mark.parametrize("a", [1, 2, 3])
def test_calibration_against_minor_sum(defining_m, G, a):
    for u in (mpq(1, 5), mpq(-3)):
        assert calibration_ratio(defining_m, G, a, u) == 1


def test_talalaev_expansion_matches_minor_sums(defining_m, G):
    m = defining_m.twisted(G)
    u = mpq(5, 3)
    coeffs = talalaev_expand(m, u)
    for a in range(4):
        assert max_abs(coeffs[a] - talalaev_minor_sum(m, a, u)) == 0


def test_fused_transfers_commute(defining_m, G):
    shapes = [(1,), (2,), (1, 1), (2, 1)]
    mats = {(s, u): fused_transfer(defining_m, G, s, u) for s in shapes for u in (mpq(1, 2), mpq(-2))}
    keys = list(mats)
    for i, k1 in enumerate(keys):
        for k2 in keys[i + 1:]:
            X, Y = mats[k1], mats[k2]
            assert max_abs(X.dot(Y) - Y.dot(X)) == 0


def test_talalaev_polys_degrees_and_values(defining_m, G):
    m = defining_m.twisted(G)
    polys = talalaev_polys(m)
    assert [p.degree for p in polys] == [0, 2, 4, 6]
    u = mpq(9, 4)
    for a, p in enumerate(polys):
        assert max_abs(p(u) - talalaev_minor_sum(m, a, u)) == 0


@pytest.mark.parametrize("s", [1, 2])
def test_hirota_gl_n_form(defining_m, G, s):
    assert hirota_residual(defining_m, G, s, mpq(2, 3), form="glN") == 0


def test_hirota_gl2_form(defining_m, n2s2_m):
    m3 = defining_m
    # identical to the general form for gl2 and for the null twist
    G2 = companion_twist([mpq(2), mpq(7)])
    assert hirota_residual(n2s2_m, G2, 1, mpq(1, 3), form="gl2") == 0
    assert hirota_residual(m3, null_twist(3, m3.ring), 2, mpq(1, 3), form="gl2") == 0
    # a generic gl3 twist needs the third term
    assert hirota_residual(m3, companion_twist(Z), 2, mpq(1, 3), form="gl2") != 0
    with pytest.raises(ValueError):
        hirota_residual(m3, companion_twist(Z), 0, mpq(1))


def test_semistandard_restriction(defining_m, n2s2_m):
    u = mpq(4, 3)
    N0 = null_twist(3, defining_m.ring)
    diff = lambda m, G, s: max_abs(fused_transfer_ssyt(m, G, s, u) - fused_transfer(m, G, s, u))
    assert diff(defining_m, N0, (1, 1)) == 0
    assert diff(n2s2_m, null_twist(2, n2s2_m.ring), (2, 1)) == 0
    one_site = build_monodromy(ChainSpec(3, 1))
    assert diff(one_site, N0, (2,)) == 0
    # row shapes overcount repeated entries on longer chains, even untwisted
    assert diff(defining_m, N0, (2,)) != 0
    assert diff(n2s2_m, null_twist(2, n2s2_m.ring), (2,)) != 0


def test_rejects_twisted_input(defining_m, G):
    with pytest.raises(ValueError):
        fused_transfer(defining_m.twisted(G), G, (1,), mpq(1))
