import itertools
from math import factorial

import numpy as np
import pytest

from glsov.chain import ChainSpec
from glsov.glrep import (BOX_BUDGET, build_rect_rep, build_rep, commutator_defect, lws_vector,
                         young_projector)
from glsov.scalars import EXACT_RING, max_abs, mpq
from glsov.young import Partition, weyl_dim

REPS = [((1,), 2), ((1,), 3), ((2,), 2), ((2,), 3), ((1, 1), 3), ((2, 1), 3), ((1,), 4), ((1, 1), 4)]


def nilpotent_exp(X):
    out = EXACT_RING.eye(X.shape[0])
    term = out
    for k in range(1, X.shape[0] + 1):
        term = term.dot(X) * mpq(1, k)
        out = out + term
    return out


@pytest.mark.parametrize("nu,N", REPS)
def test_gl_commutation_relations(nu, N):
    rep = build_rep(nu, N)
    assert rep.dim == weyl_dim(Partition(nu).padded(N), N)
    assert commutator_defect(rep) == 0


@pytest.mark.parametrize("nu,N", REPS)
def test_cartan_diagonal_on_gt_basis(nu, N):
    rep = build_rep(nu, N)
    for k in range(1, N + 1):
        H = rep.E(k, k)
        want = np.diag([mpq(p.weight()[k - 1]) for p in rep.patterns])
        assert max_abs(H - want) == 0


def test_defining_rep_is_matrix_units():
    rep = build_rect_rep(ChainSpec(3, 1))
    for i, j in itertools.product(range(1, 4), repeat=2):
        E = np.zeros((3, 3), dtype=object)
        E.fill(mpq(0))
        E[i - 1, j - 1] = mpq(1)
        assert max_abs(rep.E(i, j) - E) == 0


@pytest.mark.parametrize("nu,N", [((2,), 3), ((1, 1), 3), ((2, 1), 3)])
def test_group_element_is_a_homomorphism(nu, N):
    rep = build_rep(nu, N)
    K1 = np.array([[mpq(v) for v in r] for r in [[2, 1, 0], [0, 1, 3], [1, 0, 1]]], dtype=object)
    K2 = np.array([[mpq(v) for v in r] for r in [[1, 0, 2], [1, 1, 0], [0, 5, 1]]], dtype=object)
    assert max_abs(rep.group_element(K1.dot(K2)) - rep.group_element(K1).dot(rep.group_element(K2))) == 0
    assert max_abs(rep.group_element(EXACT_RING.eye(N)) - EXACT_RING.eye(rep.dim)) == 0
    # exp of a nilpotent generator: pi(1 + t E_ij) = exp(t pi(E_ij))
    t = mpq(3, 2)
    g = EXACT_RING.eye(N)
    g[0, 2] = t
    assert max_abs(rep.group_element(g) - nilpotent_exp(rep.E(1, 3) * t)) == 0


def test_highest_and_lowest_weight_vectors():
    rep = build_rep((2, 1), 3)
    hw, lw = rep.hws_index(), rep.lws_index()
    assert rep.patterns[hw].weight() == (2, 1, 0)
    assert rep.patterns[lw].weight() == (0, 1, 2)
    for i, j in [(1, 2), (1, 3), (2, 3)]:
        assert max_abs(rep.E(i, j).dot(rep.one_hot(hw))) == 0
        assert max_abs(rep.E(j, i).dot(rep.one_hot(lw))) == 0
    v = lws_vector(rep, 2)
    assert v.shape == (rep.dim ** 2,) and sum(v) == 1


@pytest.mark.parametrize("shape,N", [((2,), 2), ((1, 1), 3), ((2, 1), 3)])
def test_young_symmetriser_is_quasi_idempotent(shape, N):
    p = Partition(shape)
    Y = young_projector(p, N)
    c = mpq(factorial(p.size), p.n_standard())
    assert max_abs(Y.dot(Y) - Y * c) == 0
    from glsov import linalg
    assert linalg.rank(Y) == weyl_dim(p.padded(N), N)


def test_box_budget():
    with pytest.raises(ValueError):
        build_rep((BOX_BUDGET + 1,), 2)
