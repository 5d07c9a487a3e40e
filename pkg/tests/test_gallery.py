"""Builders and the audit runner."""

import json
import time
from fractions import Fraction

import pytest

from anop.errors import BadParams
from anop.gallery import (audit, build, example1, example2, random_theorem_form,
                          theorem_form)
from anop.operators import adjoint, apply, direct_sum, multiply, ops_equal_exact
from anop.predicates import hyponormal_check
from anop.scalars import Scalar
from anop.serialize import parse, serialize
from anop.vectors import VectorExpr


def test_example1_formula_application():
    t = build("example1")
    x = VectorExpr(t.spaces, [{0: Scalar.exact(1)}, {}])
    out = apply(t, x)
    assert out.support() == [(0, 1)] and out.get(0, 1) == Scalar.exact(2)


def test_right_shift_isometry():
    s = build("right_shift")
    from anop.operators import identity_operator
    assert ops_equal_exact(multiply(adjoint(s), s), identity_operator(s.spaces))


def test_scaled_shift_param():
    s = build("scaled_shift", scale=3)
    assert s.blocks[(0, 0)].diagonals[1].limit == Scalar.exact(3)


def test_theorem_form_matches_hand_built():
    from anop.gallery import flip_unitary, right_shift
    t = build("theorem_form", levels=[(3, [[0, 1], [1, 0]])], m_e=2,
              tail_power=1, h3_dim=0)
    hand = direct_sum(flip_unitary().scaled(3), right_shift(2))
    assert ops_equal_exact(t, hand)


def test_theorem_form_validates_params():
    with pytest.raises(BadParams):
        theorem_form([(1, [[1]])], m_e=2)          # level below the tail scale
    with pytest.raises(BadParams):
        theorem_form([(3, [[2]])], m_e=2)          # not unitary
    with pytest.raises(BadParams):
        theorem_form([], m_e=2, h3_dim=1, a_entries=[(0, 0, 1)])  # bad rows


def test_unknown_name():
    with pytest.raises(BadParams):
        build("mystery")


def test_random_theorem_form_is_hyponormal():
    for seed in range(6):
        t, _ = random_theorem_form(seed)
        assert hyponormal_check(t).status == "Proven"


def test_builders_serialize_round_trip():
    for name in ("example1", "example2", "right_shift", "nilpotent",
                 "jacobi", "flip_unitary"):
        t = build(name)
        assert ops_equal_exact(parse(serialize(t)), t)


def test_audit_is_deterministic_and_fast():
    t0 = time.time()
    r1 = audit(samples=1000)
    r2 = audit(samples=1000)
    elapsed = time.time() - t0
    assert elapsed < 10.0
    assert json.dumps(r1.to_json(), sort_keys=True) == \
        json.dumps(r2.to_json(), sort_keys=True)


def test_audit_records_and_flags():
    rep = audit(samples=1000)
    by_name = {r.name: r for r in rep.records}
    assert by_name["example1.images"].agreement is True
    hypo = by_name["example1.hyponormality"]
    assert hypo.agreement is False
    assert hypo.computed["corner_matrix"] == \
        [[["3", "0"], ["-1", "0"]], [["-1", "0"], ["1", "0"]]]
    assert hypo.computed["corner_psd"] is True
    assert by_name["example1.tail_coupling"].computed["s_star_a_norm"] == 0.0
    assert by_name["example2.kernels"].agreement is True
    assert by_name["example2.ess_TTstar"].computed["points"] == [0.0, 1.0]
    assert by_name["example2.adjoint_an"].agreement is True
    assert by_name["mstar_subset_m"].agreement is True
    text = rep.to_text()
    assert "DISAGREE" in text and "example1.hyponormality" in text
