from fractions import Fraction
from itertools import permutations
from math import comb, factorial, prod

import pytest
from hypothesis import given, strategies as st

from glsov.chain import ChainSpec
from glsov.scalars import mpq
from glsov.young import (GTPattern, Partition, RectPattern, enumerate_gt, enumerate_rect,
                         enumerate_tuples, gt_from_rect, partitions_in_box, predicted_x,
                         rect_from_gt, schur, schur_det, schur_ssyt, ssyt, weyl_dim)

partitions = st.lists(st.integers(0, 3), min_size=1, max_size=3).map(
    lambda xs: Partition(sorted(xs, reverse=True)))


def hook_content_dim(shape: Partition, N: int) -> int:
    """dim of the gl(N) irrep via the hook-content formula."""
    num, den = 1, 1
    T = shape.transpose()
    for a, row in enumerate(shape.parts):
        for s in range(row):
            num *= N + s - a
            den *= (row - s) + (T.parts[s] - a) - 1
    return num // den


def test_partition_basics():
    p = Partition([3, 1, 0])
    assert p.parts == (3, 1) and p.size == 4 and p.height == 2 and p.width == 3
    assert p.transpose().parts == (2, 1, 1)
    assert p.padded(4) == (3, 1, 0, 0)
    assert p.contains(Partition([2, 1]))
    assert not Partition([1]).contains(Partition([2]))
    with pytest.raises(ValueError):
        Partition([1, 2])


@given(partitions)
def test_standard_tableaux_hook_formula(p):
    if p.size == 0:
        assert p.n_standard() == 1
        return
    # brute force: fillings with 1..n increasing along rows and columns
    boxes = p.boxes()
    count = 0
    for perm in permutations(range(1, p.size + 1)):
        f = dict(zip(boxes, perm))
        if all(f[(a, s)] > f[(a, s - 1)] for a, s in boxes if s > 1) and \
           all(f[(a, s)] > f[(a - 1, s)] for a, s in boxes if a > 1):
            count += 1
    assert p.n_standard() == count


@given(partitions, st.integers(2, 4))
def test_gt_count_matches_weyl_and_hook_content(p, N):
    if p.height > N:
        return
    pats = enumerate_gt(p.padded(N), N)
    assert len(pats) == weyl_dim(p.padded(N), N) == hook_content_dim(p, N)
    assert len(set(pats)) == len(pats)
    assert len(list(ssyt(p, N))) == len(pats)


def test_gt_order_and_weights():
    pats = enumerate_gt((1, 0, 0), 3)
    assert [p.weight() for p in pats] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    pats = enumerate_gt((2, 1, 0), 3)
    assert pats[0].rows == ((2,), (2, 1), (2, 1, 0))
    for p in pats:
        assert sum(p.weight()) == 3


def test_gt_interlacing_validation():
    with pytest.raises(ValueError):
        GTPattern(((3,), (2, 1), (2, 1, 0)))


@pytest.mark.parametrize("N,A,S", [(2, 1, 1), (3, 1, 2), (3, 2, 1), (4, 2, 1), (4, 1, 2)])
def test_rect_patterns_biject_with_gt(N, A, S):
    rects = enumerate_rect(N, A, S)
    assert len(rects) == weyl_dim((S,) * A, N)
    assert [r.flat() for r in rects] == sorted(r.flat() for r in rects)
    gts = enumerate_gt((S,) * A + (0,) * (N - A), N)
    assert {rect_from_gt(g, A, S) for g in gts} == set(rects)
    for r in rects:
        assert rect_from_gt(gt_from_rect(r, N, A), A, S) == r


def test_partitions_in_box_count():
    for a in range(1, 4):
        for s in range(0, 4):
            assert len(partitions_in_box(a, s)) == comb(a + s, a)


def test_rect_tuples_count():
    assert len(enumerate_tuples(3, 1, 1, 2)) == 9
    assert len(enumerate_tuples(2, 1, 2, 2)) == 9


def test_rect_pattern_validation():
    with pytest.raises(ValueError):
        RectPattern(((1,), (0,)), 1)     # rows must grow down the table
    with pytest.raises(ValueError):
        RectPattern(((2,),), 1)


@given(partitions, st.lists(st.integers(2, 9), min_size=3, max_size=3, unique=True))
def test_schur_determinant_equals_tableau_sum(mu, zs):
    z = [mpq(v) for v in zs]
    if mu.height > 3:
        return
    assert schur_det(mu, z) == schur_ssyt(mu, z)


def test_schur_degenerate_falls_back():
    assert schur(Partition([1, 1]), [mpq(1), mpq(1)]) == 1
    assert schur(Partition([2]), [mpq(1), mpq(1)]) == 3
    assert schur(Partition([]), [mpq(2)]) == 1


def test_predicted_x_zero_tuple():
    spec = ChainSpec(3, 2)
    zero = enumerate_tuples(3, 1, 1, 2)[0]
    xs, b = predicted_x(zero, spec)
    th = spec.theta
    assert xs == [[[th[0]], [th[0]]], [[th[1]], [th[1]]]]
    assert b.degree == 4 and b.lead == 1
