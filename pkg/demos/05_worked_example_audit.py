"""The worked-example audit.

Two operators ship with the gallery together with the claims documented
about them. The audit recomputes every checkable claim with exact
arithmetic and flags agreement or disagreement; notably, the first
example's own displayed products give a positive-definite corner form, so
the recorded "not hyponormal" claim is contradicted by its own data. The
audit reports both sides and asserts neither.
"""

from anop.gallery import audit, example1, example2
from anop.operators import adjoint, apply, multiply
from anop.scalars import Scalar
from anop.vectors import VectorExpr

t1 = example1()
x = VectorExpr(t1.spaces, [{0: Scalar.exact(1)}, {}])
print("example 1 sends e0 to:", apply(t1, x))

t2 = example2()
y = VectorExpr(t2.spaces, [{2: Scalar.exact(1)}, {}])
print("example 2 sends the third unit vector to:", apply(t2, y))

report = audit(samples=2000)
print()
print(report.to_text())

disagreements = [r.name for r in report.records if r.agreement is False]
print()
print("records disagreeing with their recorded claim:", disagreements)
