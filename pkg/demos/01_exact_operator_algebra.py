"""A tour of the exact operator algebra.

The representable universe: block operators over l2 and C^n components
whose diagonal l2 blocks are banded with eventually-constant (or
rule-governed) diagonals and whose couplings are finitely supported.
Everything here is computed with rational arithmetic and no rounding.
"""

from anop import (L2, adjoint, apply, combine, identity_operator, multiply,
                  ops_equal_exact, parse, serialize, truncate)
from anop.gallery import right_shift
from anop.scalars import Scalar
from anop.vectors import VectorExpr

# the right shift S: e_n -> e_{n+1}, stored as one diagonal with limit 1
s = right_shift()
print("S serialized:", serialize(s))

# S* S = I exactly, while S S* misses the first coordinate
print("S*S == I:", ops_equal_exact(multiply(adjoint(s), s),
                                   identity_operator(s.spaces)))
proj = multiply(s, adjoint(s))
seq = proj.blocks[(0, 0)].diagonals[0]
print("S S* diagonal: prefix", [str(v.re) for v in seq.prefix],
      "limit", seq.limit.re)

# the difference T*T - TT* for T = S is the rank-one projector onto e0
diff = combine([(1, multiply(adjoint(s), s)), (-1, proj)])
print("T*T - TT* =", diff.blocks[(0, 0)].diagonals[0])

# exact application: finitely supported in, finitely supported out
x = VectorExpr(s.spaces, [{0: Scalar.exact(1), 3: Scalar.exact(-2)}])
print("S x for x = e0 - 2 e3:", apply(s, x))

# products convolve diagonals and absorb corner corrections into prefixes
s2 = multiply(s.scaled(2), s.scaled(2))
print("(2S)(2S) diagonals:", s2.blocks[(0, 0)].diagonals)

# truncation reports a certified tail bound alongside the dense window
t = truncate(s.scaled(2), 5)
print("5x5 window of 2S:\n", t.matrix.real)
print("tail bound:", t.tail_bound)

# serialization round-trips bit-exactly on the exact tier
assert ops_equal_exact(parse(serialize(s2)), s2)
print("round trip exact: True")
