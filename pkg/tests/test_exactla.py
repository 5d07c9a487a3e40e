"""Exact linear algebra fuzzed against dense float oracles."""

import random
from fractions import Fraction

import numpy as np

from anop.exactla import (inverse, kernel_basis, mat_mul, mat_vec, psd_decide,
                          quad_form, rank, verify_eigenvalue)
from anop.scalars import Scalar
from conftest import rand_scalar


def _rand_hermitian(rng, n, shift=0):
    m = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = rand_scalar(rng)
            if i == j:
                v = Scalar.exact(v.re + shift)
            m[i][j] = v if i != j else Scalar.exact(v.re)
            m[j][i] = m[i][j].conj()
    for i in range(n):
        m[i][i] = Scalar.exact(m[i][i].re + shift)
    return m


def _to_np(m):
    return np.array([[complex(v) for v in row] for row in m])


def test_psd_decision_matches_float_oracle():
    rng = random.Random(1)
    agree = 0
    for trial in range(120):
        n = rng.randint(1, 6)
        shift = rng.choice([0, 0, 2, 5, -2])
        m = _rand_hermitian(rng, n, shift)
        ok, wit = psd_decide(m)
        w = np.linalg.eigvalsh(_to_np(m))
        if ok:
            assert w[0] >= -1e-9, (trial, w)
        else:
            # the witness certifies indefiniteness exactly
            form = quad_form(m, wit)
            assert form.is_real() and form.re < 0
            assert w[0] < 1e-9
        agree += 1
    assert agree == 120


def test_psd_zero_diagonal_witness():
    m = [[Scalar.exact(0), Scalar.exact(1)], [Scalar.exact(1), Scalar.exact(0)]]
    ok, wit = psd_decide(m)
    assert not ok
    assert quad_form(m, wit).re < 0


def test_kernel_and_rank_match_float_oracle():
    rng = random.Random(2)
    for trial in range(60):
        n = rng.randint(1, 5)
        r = rng.randint(0, n)
        # build a rank-r matrix from random factors
        a = [[rand_scalar(rng) for _ in range(r)] for _ in range(n)]
        b = [[rand_scalar(rng) for _ in range(n)] for _ in range(r)]
        m = mat_mul(a, b) if r else [[Scalar.exact(0)] * n for _ in range(n)]
        got_rank = rank(m)
        np_rank = np.linalg.matrix_rank(_to_np(m), tol=1e-9) if r else 0
        assert got_rank == np_rank
        ker = kernel_basis(m)
        assert len(ker) == n - got_rank
        for v in ker:
            assert all(x.is_zero() for x in mat_vec(m, v))


def test_inverse_exact():
    rng = random.Random(3)
    done = 0
    for trial in range(40):
        n = rng.randint(1, 5)
        m = [[rand_scalar(rng) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            m[i][i] = m[i][i] + Scalar.exact(4)
        inv = inverse(m)
        if inv is None:
            continue
        prod = mat_mul(m, inv)
        for i in range(n):
            for j in range(n):
                assert prod[i][j] == Scalar.exact(1 if i == j else 0)
        done += 1
    assert done >= 35


def test_verify_eigenvalue_is_exact():
    m = [[Scalar.exact(2), Scalar.exact(1)], [Scalar.exact(1), Scalar.exact(2)]]
    assert verify_eigenvalue(m, Fraction(3))
    assert verify_eigenvalue(m, Fraction(1))
    assert not verify_eigenvalue(m, Fraction(2))
