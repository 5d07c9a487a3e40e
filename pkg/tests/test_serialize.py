import json

import pytest

from anop.errors import SchemaError
from anop.gallery import example1, example2, right_shift
from anop.operators import adjoint, apply, multiply, ops_equal_exact
from anop.scalars import Scalar
from anop.serialize import load, operator_to_json_dict, parse, serialize
from anop.vectors import VectorExpr
from conftest import random_exact_operator


def test_builtin_right_shift_scaled():
    t = parse('{"builtin": "right_shift", "scale": 2}')
    assert ops_equal_exact(t, right_shift(2))


def test_builtin_identity_and_diag():
    ident = parse('{"builtin": "identity"}')
    assert ident.blocks[(0, 0)].diagonals[0].limit == Scalar.exact(1)
    d = parse('{"builtin": "diag", "entries": [5, 3], "limit": 2}')
    seq = d.blocks[(0, 0)].diagonals[0]
    assert [v.re for v in seq.prefix] == [5, 3] and seq.limit.re == 2


def test_rational_string_literals_bit_exact():
    t = parse('{"spaces": [{"kind": "l2"}], "blocks": [{"row": 0, "col": 0, '
              '"kind": "banded", "diagonals": [{"offset": 0, '
              '"prefix": [["1/3", "-2/7"]], "limit": ["22/7", 0]}]}]}')
    seq = t.blocks[(0, 0)].diagonals[0]
    assert str(seq.prefix[0].re) == "1/3" and str(seq.prefix[0].im) == "-2/7"
    assert str(seq.limit.re) == "22/7"
    assert ops_equal_exact(parse(serialize(t)), t)


def test_round_trip_random_exact_operators():
    for seed in range(15):
        a = random_exact_operator(seed)
        b = parse(serialize(a))
        assert ops_equal_exact(a, b)
        assert serialize(b) == serialize(a)


def test_round_trip_rule_tier():
    t2 = example2()
    again = parse(serialize(t2))
    seq1 = t2.blocks[(0, 0)].diagonals[1]
    seq2 = again.blocks[(0, 0)].diagonals[1]
    assert seq1.rule == seq2.rule
    assert ops_equal_exact(t2, again)


def test_example1_file_matches_formula():
    import random
    from fractions import Fraction
    t = parse(serialize(example1()))
    rng = random.Random(3)
    for _ in range(20):
        x = VectorExpr(t.spaces, [
            {k: Scalar.exact(Fraction(rng.randint(-9, 9), rng.randint(1, 4)))
             for k in rng.sample(range(5), 2)},
            {0: Scalar.exact(rng.randint(-4, 4)), 1: Scalar.exact(rng.randint(-4, 4))}])
        out = apply(t, x)
        # (y1, 2x1, 2x2, ...) on the first component, (y1, y2) on the second
        assert out.get(0, 0) == x.get(1, 0)
        for k in range(5):
            assert out.get(0, k + 1) == Scalar.exact(2) * x.get(0, k)
        assert out.get(1, 0) == x.get(1, 0)
        assert out.get(1, 1) == x.get(1, 1)


def test_schema_errors_carry_paths():
    with pytest.raises(SchemaError):
        parse("{not json")
    with pytest.raises(SchemaError) as exc:
        parse('{"spaces": [{"kind": "weird"}]}')
    assert "spaces[0]" in str(exc.value)
    with pytest.raises(SchemaError) as exc:
        parse('{"spaces": [{"kind": "l2"}], "blocks": [{"row": 0, "col": 0, '
              '"kind": "banded", "diagonals": [{"prefix": []}]}]}')
    assert "diagonals[0]" in str(exc.value)
    with pytest.raises(SchemaError):
        parse('{"spaces": [{"kind": "l2"}], "blocks": [{"row": 0, "col": 5, '
              '"kind": "banded", "diagonals": []}]}')


def test_missing_limit_defaults_to_zero():
    t = parse('{"spaces": [{"kind": "l2"}], "blocks": [{"row": 0, "col": 0, '
              '"kind": "banded", "diagonals": [{"offset": 1, "prefix": [[2, 0]]}]}]}')
    seq = t.blocks[(0, 0)].diagonals[1]
    assert seq.limit.is_zero() and seq.tier == "exact"


def test_float_values_round_trip():
    t = parse('{"spaces": [{"kind": "l2"}], "blocks": [{"row": 0, "col": 0, '
              '"kind": "banded", "diagonals": [{"offset": 0, '
              '"prefix": [[0.125, -2.5]], "limit": [0.1, 0]}]}]}')
    seq = t.blocks[(0, 0)].diagonals[0]
    assert not seq.prefix[0].is_exact
    again = parse(serialize(t))
    s2 = again.blocks[(0, 0)].diagonals[0]
    assert s2.prefix[0].re == 0.125 and s2.prefix[0].im == -2.5
    assert s2.limit.re == 0.1
