"""JSON operator files.

Top level is either {"spaces": [...], "blocks": [...]} or a builtin
shorthand {"builtin": "identity"|"right_shift"|"diag", ...}. Complex
literals are [re, im] where each part is a number or a rational string
"p/q"; a bare number is accepted on input and read as a real. Exact
values round-trip bit-exactly.
"""

import json
from fractions import Fraction

from .blocks import BandedBlock, DenseBlock, FiniteRankBlock
from .diagonals import DiagonalSeq
from .errors import SchemaError
from .operators import L2, OperatorExpr, finite
from .ratfn import RationalFn
from .scalars import Scalar


# -- scalar literals -----------------------------------------------------------

def _part_from_json(x, path):
    if isinstance(x, bool):
        raise SchemaError("boolean is not a number", path)
    if isinstance(x, int):
        return Fraction(x), True
    if isinstance(x, float):
        return x, False
    if isinstance(x, str):
        try:
            return Fraction(x), True
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad rational literal {x!r}: {exc}", path)
    raise SchemaError(f"expected number or 'p/q' string, got {type(x).__name__}", path)


def scalar_from_json(obj, path="value"):
    if isinstance(obj, (int, float, str)):
        re, ex = _part_from_json(obj, path)
        return Scalar.exact(re) if ex else Scalar.inexact(re)
    if isinstance(obj, list) and len(obj) == 2:
        re, ex1 = _part_from_json(obj[0], path + "[0]")
        im, ex2 = _part_from_json(obj[1], path + "[1]")
        if ex1 and ex2:
            return Scalar.exact(re, im)
        return Scalar.inexact(float(re), float(im))
    raise SchemaError("complex literal must be [re, im] or a bare real", path)


def _part_to_json(x, is_exact):
    if is_exact:
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return float(x)


def scalar_to_json(s):
    return [_part_to_json(s.re, s.is_exact), _part_to_json(s.im, s.is_exact)]


# -- operator encoding -----------------------------------------------------------

def operator_to_json_dict(op):
    spaces = []
    for sp in op.spaces:
        spaces.append({"kind": "l2"} if sp.kind == "l2"
                      else {"kind": "finite", "dim": sp.dim})
    blocks = []
    for (i, j) in sorted(op.blocks):
        blk = op.blocks[(i, j)]
        if isinstance(blk, BandedBlock):
            diags = []
            for off in sorted(blk.diagonals):
                d = blk.diagonals[off]
                ent = {"offset": off,
                       "prefix": [scalar_to_json(v) for v in d.prefix],
                       "limit": scalar_to_json(d.limit)}
                if d.rule is not None:
                    ent["rule"] = d.rule.to_json()
                if d.decay is not None:
                    ent["decay"] = {"C": d.decay[0], "p": d.decay[1]}
                diags.append(ent)
            blocks.append({"row": i, "col": j, "kind": "banded", "diagonals": diags})
        elif isinstance(blk, FiniteRankBlock):
            blocks.append({"row": i, "col": j, "kind": "finite_rank",
                           "entries": [{"r": r, "c": c, "value": scalar_to_json(v)}
                                       for (r, c), v in sorted(blk.entries.items())]})
        else:
            blocks.append({"row": i, "col": j, "kind": "dense",
                           "matrix": [[scalar_to_json(v) for v in row]
                                      for row in blk.matrix]})
    return {"spaces": spaces, "blocks": blocks}


def serialize(op):
    return json.dumps(operator_to_json_dict(op), sort_keys=True,
                      separators=(",", ":"))


# -- operator decoding -----------------------------------------------------------

def _space_from_json(obj, path):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("space must be an object with a 'kind'", path)
    if obj["kind"] == "l2":
        return L2
    if obj["kind"] == "finite":
        dim = obj.get("dim")
        if not isinstance(dim, int) or dim < 1:
            raise SchemaError("finite space needs a positive integer 'dim'", path)
        return finite(dim)
    raise SchemaError(f"unknown space kind {obj['kind']!r}", path)


def _diag_from_json(obj, path):
    if "offset" not in obj:
        raise SchemaError("diagonal needs an 'offset'", path)
    prefix = [scalar_from_json(v, f"{path}.prefix[{k}]")
              for k, v in enumerate(obj.get("prefix", []))]
    limit = scalar_from_json(obj["limit"], path + ".limit") if "limit" in obj \
        else Scalar.exact(0)
    rule = None
    if "rule" in obj:
        try:
            rule = RationalFn.from_json(obj["rule"])
        except Exception as exc:
            raise SchemaError(f"bad entry rule: {exc}", path + ".rule")
    decay = None
    if "decay" in obj:
        d = obj["decay"]
        if not isinstance(d, dict) or "C" not in d or "p" not in d:
            raise SchemaError("decay must carry C and p", path + ".decay")
        decay = (float(d["C"]), float(d["p"]))
    return int(obj["offset"]), DiagonalSeq(prefix, limit, rule, decay)


def _builtin(obj, path="builtin"):
    name = obj["builtin"]
    scale = scalar_from_json(obj["scale"], path + ".scale") if "scale" in obj \
        else Scalar.exact(1)
    if name == "identity":
        diag = DiagonalSeq(limit=scale)
    elif name == "right_shift":
        return OperatorExpr((L2,), {(0, 0): BandedBlock(
            {1: DiagonalSeq(limit=scale)})})
    elif name == "diag":
        entries = [scale * scalar_from_json(v, f"{path}.entries[{k}]")
                   for k, v in enumerate(obj.get("entries", []))]
        limit = scale * scalar_from_json(obj["limit"], path + ".limit") \
            if "limit" in obj else Scalar.exact(0)
        rule = None
        if "rule" in obj:
            rule = RationalFn.from_json(obj["rule"])
            if scale.is_exact and scale.is_real():
                rule = rule.scale(Fraction(scale.re))
            else:
                raise SchemaError("diag rule requires an exact real scale", path)
        diag = DiagonalSeq(entries, limit, rule)
    else:
        raise SchemaError(f"unknown builtin {name!r}", path)
    return OperatorExpr((L2,), {(0, 0): BandedBlock({0: diag})})


def operator_from_json_dict(obj):
    if not isinstance(obj, dict):
        raise SchemaError("top level must be an object")
    if "builtin" in obj:
        return _builtin(obj)
    if "spaces" not in obj:
        raise SchemaError("missing 'spaces'")
    spaces = tuple(_space_from_json(s, f"spaces[{i}]")
                   for i, s in enumerate(obj["spaces"]))
    blocks = {}
    for bi, b in enumerate(obj.get("blocks", [])):
        path = f"blocks[{bi}]"
        if not isinstance(b, dict) or "row" not in b or "col" not in b:
            raise SchemaError("block needs 'row' and 'col'", path)
        i, j = int(b["row"]), int(b["col"])
        if not (0 <= i < len(spaces) and 0 <= j < len(spaces)):
            raise SchemaError("block row/col outside the space list", path)
        kind = b.get("kind")
        if kind == "banded":
            diags = {}
            for di, d in enumerate(b.get("diagonals", [])):
                off, seq = _diag_from_json(d, f"{path}.diagonals[{di}]")
                if off in diags:
                    raise SchemaError(f"duplicate offset {off}", path)
                diags[off] = seq
            blk = BandedBlock(diags)
        elif kind == "finite_rank":
            entries = {}
            for ei, e in enumerate(b.get("entries", [])):
                epath = f"{path}.entries[{ei}]"
                if "r" not in e or "c" not in e or "value" not in e:
                    raise SchemaError("entry needs r, c, value", epath)
                entries[(int(e["r"]), int(e["c"]))] = scalar_from_json(
                    e["value"], epath + ".value")
            blk = FiniteRankBlock(entries)
        elif kind == "dense":
            blk = DenseBlock([[scalar_from_json(v, f"{path}.matrix[{r}][{c}]")
                               for c, v in enumerate(row)]
                              for r, row in enumerate(b.get("matrix", []))])
        else:
            raise SchemaError(f"unknown block kind {kind!r}", path)
        if (i, j) in blocks:
            raise SchemaError(f"duplicate block position ({i},{j})", path)
        blocks[(i, j)] = blk
    try:
        return OperatorExpr(spaces, blocks)
    except Exception as exc:
        raise SchemaError(str(exc))


def parse(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}")
    return operator_from_json_dict(obj)


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())
