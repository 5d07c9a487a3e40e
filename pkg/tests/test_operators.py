"""Exact-algebra contracts: the closed operations, their identities, and
truncation behavior, checked against independent dense-matrix oracles."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from anop.blocks import BandedBlock, FiniteRankBlock
from anop.diagonals import DiagonalSeq
from anop.errors import NSmallerThanBand, ShapeMismatch
from anop.exactla import mat_mul
from anop.gallery import example1, example2, right_shift
from anop.operators import (L2, OperatorExpr, adjoint, apply, combine,
                            corner_sizes, dense_window, identity_operator,
                            merge_sizes, multiply, ops_equal_exact, truncate,
                            window_sizes, zero_operator)
from anop.scalars import Scalar
from anop.vectors import VectorExpr
from conftest import random_exact_operator


def dense_oracle(op, n):
    """Independent dense image of the window: plain entry enumeration."""
    t = truncate(op, n)
    return t.matrix


def test_combine_additive_inverse():
    s = right_shift()
    z = combine([(1, s), (-1, s)])
    assert not z.blocks


def test_combine_identity_doubling():
    ident = identity_operator((L2,))
    two = combine([(1, ident), (1, ident)])
    d = two.blocks[(0, 0)].diagonals[0]
    assert d.limit == Scalar.exact(2) and not d.prefix


def test_combine_shift_commutator_is_rank_one():
    s = right_shift()
    d = combine([(1, multiply(adjoint(s), s)), (-1, multiply(s, adjoint(s)))])
    seq = d.blocks[(0, 0)].diagonals[0]
    assert [v.re for v in seq.prefix] == [1] and seq.limit.is_zero()
    # dense 64x64 truncation oracle
    sd = np.eye(64, k=-1)
    oracle = sd.T @ sd - sd @ sd.T
    oracle[63, 63] = 0  # boundary artifact of the finite section
    got = dense_oracle(d, 64)
    got[63, 63] = 0
    assert np.array_equal(got.real, oracle) and not got.imag.any()


def test_combine_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        combine([(1, right_shift()), (1, example1())])


def test_multiply_isometry_identity():
    s = right_shift()
    assert ops_equal_exact(multiply(adjoint(s), s), identity_operator((L2,)))


def test_multiply_shift_range_projection():
    s = right_shift()
    got = multiply(s, adjoint(s))
    sd = np.eye(32, k=-1)
    assert np.array_equal(dense_oracle(got, 32).real, sd @ sd.T)


def test_multiply_scaled_shifts():
    s2 = right_shift(2)
    got = multiply(s2, s2)
    assert set(got.blocks[(0, 0)].diagonals) == {2}
    seq = got.blocks[(0, 0)].diagonals[2]
    assert seq.limit == Scalar.exact(4) and not seq.prefix
    sd = 2 * np.eye(24, k=-1)
    assert np.allclose(dense_oracle(got, 24), sd @ sd)


def test_adjoint_involution_and_shift():
    s = right_shift()
    assert set(adjoint(s).blocks[(0, 0)].diagonals) == {-1}
    for seed in range(5):
        a = random_exact_operator(seed)
        assert ops_equal_exact(adjoint(adjoint(a)), a)


def test_adjoint_inner_product_identity_example1():
    t = example1()
    rng = random.Random(7)
    for _ in range(50):
        x = VectorExpr(t.spaces, [
            {k: Scalar.exact(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
             for k in rng.sample(range(6), 3)},
            {0: Scalar.exact(rng.randint(-3, 3)), 1: Scalar.exact(rng.randint(-3, 3))}])
        y = VectorExpr(t.spaces, [
            {k: Scalar.exact(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
             for k in rng.sample(range(6), 3)},
            {0: Scalar.exact(rng.randint(-3, 3)), 1: Scalar.exact(rng.randint(-3, 3))}])
        lhs = apply(t, x).inner(y)
        rhs = x.inner(apply(adjoint(t), y))
        assert lhs == rhs


def test_apply_shift_basis():
    s = right_shift()
    e0 = VectorExpr.basis(s.spaces, 0, 0)
    assert apply(s, e0).support() == [(0, 1)]


def test_apply_example1_formula():
    t = example1()
    x = VectorExpr(t.spaces, [{}, {0: Scalar.exact(1)}])
    out = apply(t, x)
    assert out.get(0, 0) == Scalar.exact(1)
    assert out.get(1, 0) == Scalar.exact(1)
    assert len(out.support()) == 2


def test_apply_example1_tstart_formula():
    t = example1()
    q = multiply(adjoint(t), t)
    x = VectorExpr(t.spaces, [{0: Scalar.exact(3)},
                              {0: Scalar.exact(5), 1: Scalar.exact(7)}])
    out = apply(q, x)
    assert out.get(0, 0) == Scalar.exact(12)
    assert out.get(1, 0) == Scalar.exact(10)
    assert out.get(1, 1) == Scalar.exact(7)


def test_truncate_identity_and_scaled_shift():
    ident = identity_operator((L2,))
    t = truncate(ident, 3)
    assert np.array_equal(t.matrix, np.eye(3))
    s2 = right_shift(2)
    t2 = truncate(s2, 4)
    assert np.array_equal(t2.matrix, 2 * np.eye(4, k=-1))


def test_truncate_example2_ttstar():
    t2 = example2()
    q = multiply(t2, adjoint(t2))
    tr = truncate(q, 5)
    first = np.diag([1.0, 1.0, 0.25, 1.0 / 9, 1.0 / 16])
    expect = np.zeros((10, 10))
    expect[:5, :5] = first
    expect[5:, 5:] = np.eye(5)
    assert np.allclose(tr.matrix, expect, atol=1e-15)


def test_truncate_band_guard():
    s2 = multiply(right_shift(), right_shift())
    with pytest.raises(NSmallerThanBand):
        truncate(s2, 1)


def test_truncate_tail_bound_sound():
    # the reported bound dominates the norm of what the window dropped
    a = random_exact_operator(3, spaces=(L2,))
    t8 = truncate(a, 8)
    t40 = truncate(a, 40)
    diff = t40.matrix.copy()
    diff[:8, :8] = 0
    assert np.linalg.norm(diff, 2) <= t8.tail_bound + 1e-12


def test_tail_action_matches_symbol_prediction():
    # a unit vector supported beyond every prefix sees only the limits
    for seed in range(6):
        a = random_exact_operator(seed, spaces=(L2,))
        blk = a.blocks.get((0, 0))
        if blk is None:
            continue
        k = blk.prefix_extent() + blk.bandwidth + 3
        x = VectorExpr.basis(a.spaces, 0, k)
        out = apply(a, x)
        expect = sum(float(d.limit.abs2().re) for d in blk.diagonals.values())
        assert math.isclose(float(out.norm2().re), expect, abs_tol=1e-30)


def test_ring_axioms_small():
    for seed in range(20):
        rng = random.Random(1000 + seed)
        spaces = random_exact_operator(seed).spaces
        a = random_exact_operator(seed * 3 + 1, spaces=spaces)
        b = random_exact_operator(seed * 3 + 2, spaces=spaces)
        c = random_exact_operator(seed * 3 + 3, spaces=spaces)
        assert ops_equal_exact(multiply(multiply(a, b), c),
                               multiply(a, multiply(b, c)))
        assert ops_equal_exact(multiply(a, b + c),
                               multiply(a, b) + multiply(a, c))
        assert ops_equal_exact(adjoint(multiply(a, b)),
                               multiply(adjoint(b), adjoint(a)))


def test_truncation_interior_agreement():
    n = 24
    for seed in range(8):
        spaces = (L2,)
        a = random_exact_operator(seed + 50, spaces=spaces)
        b = random_exact_operator(seed + 90, spaces=spaces)
        wa = a.blocks.get((0, 0)).bandwidth if (0, 0) in a.blocks else 0
        wb = b.blocks.get((0, 0)).bandwidth if (0, 0) in b.blocks else 0
        prod = multiply(a, b)
        sizes = window_sizes(prod, n)
        exact_prod = dense_window(prod, sizes)
        sect = mat_mul(dense_window(a, sizes), dense_window(b, sizes))
        interior = n - wa - wb
        for r in range(interior):
            for c in range(interior):
                assert exact_prod[r][c] == sect[r][c]


def test_rule_tier_products_keep_exact_entries():
    t2 = example2()
    q = multiply(adjoint(t2), t2)
    seq = q.blocks[(0, 0)].diagonals[0]
    for k in range(1, 30):
        assert seq.entry(k).re == Fraction(1, (k + 1) ** 2)


def test_apply_shape_mismatch():
    t = example1()
    with pytest.raises(ShapeMismatch):
        apply(t, VectorExpr((L2,), [{0: Scalar.exact(1)}]))


def test_sup_norm_bound_dominates_sections():
    from anop.operators import op_sup_norm_bound
    import numpy as np
    for seed in range(6):
        a = random_exact_operator(seed + 200)
        bound = op_sup_norm_bound(a)
        sec = truncate(a, 24).matrix
        assert np.linalg.norm(sec, 2) <= bound + 1e-9


def test_rule_tier_double_product_matches_sections():
    # (T*T)(TT*) for the weighted-shift example, checked on the interior of
    # a 40-wide window against the product of dense sections
    t2 = example2()
    q1 = multiply(adjoint(t2), t2)
    q2 = multiply(t2, adjoint(t2))
    prod = multiply(q1, q2)
    n = 40
    sec = truncate(prod, n).matrix
    oracle = truncate(q1, n).matrix @ truncate(q2, n).matrix
    assert np.max(np.abs(sec[: n - 1, : n - 1] - oracle[: n - 1, : n - 1])) < 1e-14
