from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from glsov import linalg
from glsov.poly import Poly, interpolate, q_theta, shift, shifted_product
from glsov.scalars import (EXACT_RING, FLOAT_RING, fmt_scalar, is_exact_scalar, max_abs, mpq,
                           parse_scalar, to_exact)

rats = st.fractions(min_value=-20, max_value=20, max_denominator=12).map(lambda f: mpq(f.numerator, f.denominator))
polys = st.lists(rats, min_size=0, max_size=6).map(Poly)


def leibniz_det(M):
    n = len(M)
    total = Fraction(0)
    for p in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if p[i] > p[j]:
                    sign = -sign
        term = Fraction(sign)
        for i in range(n):
            term *= Fraction(M[i][p[i]])
        total += term
    return total


def test_to_exact_parses_strings_and_floats():
    assert to_exact("3/7") == mpq(3, 7)
    assert to_exact("-2") == mpq(-2)
    assert to_exact(2.0) == mpq(2)
    with pytest.raises(TypeError):
        to_exact(0.5)
    assert is_exact_scalar(to_exact(4))


def test_fmt_and_parse_roundtrip():
    for q in [mpq(0), mpq(-5, 3), mpq(7)]:
        assert parse_scalar(fmt_scalar(q)) == q
    assert fmt_scalar(mpq(-5, 3)) == "-5/3"


def test_ring_tags():
    assert EXACT_RING.exact and not FLOAT_RING.exact
    assert EXACT_RING.zeros((2, 2)).dtype == object
    assert EXACT_RING.is_zero(mpq(0)) and not EXACT_RING.is_zero(mpq(1, 10 ** 30))
    assert FLOAT_RING.is_zero(1e-12) and not FLOAT_RING.is_zero(1e-3)


@given(polys, polys, rats)
def test_poly_ring_axioms_against_pointwise_evaluation(p, q, u):
    assert (p * q)(u) == p(u) * q(u)
    assert (p + q)(u) == p(u) + q(u)
    assert (p - q)(u) == p(u) - q(u)


@given(polys, polys.filter(lambda q: not q.is_zero()))
def test_divmod_identity(p, q):
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


@given(st.lists(rats, min_size=1, max_size=6, unique=True), st.data())
def test_interpolation_recovers_values(xs, data):
    ys = [data.draw(rats) for _ in xs]
    p = interpolate(list(zip(xs, ys)))
    assert all(p(x) == y for x, y in zip(xs, ys))
    assert p.degree <= len(xs) - 1


@given(polys, st.integers(-3, 3), st.integers(-3, 3), rats)
def test_shift_composes(p, a, b, u):
    assert shift(shift(p, a), b)(u) == p(u + a + b)


def test_q_theta_and_shifted_product():
    Q = q_theta([mpq(0), mpq(1, 3)])
    assert Q.coeffs == (0, mpq(-1, 3), 1)
    P = shifted_product({1: 2, 0: 1}, Q)
    u = mpq(5, 7)
    assert P(u) == Q(u) * Q(u - 1) ** 2
    with pytest.raises(ValueError):
        shifted_product({1: -1}, Q)


def test_complex_evaluation_of_exact_poly():
    p = Poly([mpq(1, 3), mpq(2)])
    v = p(0.5 + 1j)
    assert isinstance(v, complex)
    assert abs(v - (1 / 3 + 2 * (0.5 + 1j))) < 1e-15


def test_roots_and_monic():
    p = Poly([mpq(6), mpq(-5), mpq(1)]) * mpq(3)
    assert p.monic().lead == 1
    assert sorted(np.round(p.roots().real, 12)) == [2.0, 3.0]


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=4, max_size=4))
def test_det_matches_leibniz(M):
    a = np.array([[mpq(v) for v in r] for r in M], dtype=object)
    assert linalg.det(a) == leibniz_det(M)


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3))
def test_charpoly_and_rank_match_sympy(M):
    a = np.array([[mpq(v) for v in r] for r in M], dtype=object)
    sm = sympy.Matrix(M)
    want = [sympy.Rational(c) for c in reversed(sm.charpoly().all_coeffs())]
    assert [sympy.Rational(int(c.numerator), int(c.denominator)) for c in linalg.charpoly(a)] == want
    assert linalg.rank(a) == sm.rank()


def test_nullspace_solve_inv():
    a = np.array([[mpq(1), mpq(2), mpq(3)], [mpq(2), mpq(4), mpq(6)], [mpq(1), mpq(0), mpq(1)]], dtype=object)
    ns = linalg.nullspace(a)
    assert ns.shape[0] == 1
    assert max_abs(a.dot(ns[0])) == 0
    b = np.array([[mpq(2), mpq(1)], [mpq(1), mpq(1)]], dtype=object)
    assert max_abs(b.dot(linalg.inv(b)) - EXACT_RING.eye(2)) == 0
    x = linalg.solve(b, np.array([mpq(3), mpq(2)], dtype=object))
    assert list(x) == [1, 1]
