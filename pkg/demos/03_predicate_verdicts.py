"""The verdict engine.

Verdicts separate Proven (exact structural argument) from Numerical
(supporting evidence only); refutations always carry a witness vector that
re-checks against the defining inequality, exactly on exact data.
"""

from anop import (adjoint, an_check, apply, compute_M_and_Mstar, direct_sum,
                  hyponormal_check, is_normal, multiply, norm_attaining_check,
                  paranormal_refute, revalidate_witness, star_paranormal_check)
from anop.gallery import (diag_operator, example2, flip_unitary,
                          nilpotent_pair, right_shift)
from anop.ratfn import RationalFn

s = right_shift()

# the shift is hyponormal (its self-commutator is the rank-one projector),
# hence star-paranormal by the structural route
print("hyponormal(S):", hyponormal_check(s).status)
print("star-paranormal(S):", star_paranormal_check(s, samples=500).status)

# its adjoint is refuted with the witness e0, and the witness re-checks
v = hyponormal_check(adjoint(s))
print("hyponormal(S*):", v.status, "witness:", v.witness,
      "re-checks:", revalidate_witness(v, adjoint(s)))

# a nilpotent with nonzero adjoint kills both paranormality inequalities
nil = nilpotent_pair()
print("paranormal(nilpotent):", paranormal_refute(nil, samples=200).status)
print("star-paranormal(nilpotent):",
      star_paranormal_check(nil, samples=200).status)

# norm attainment and the two attainment subspaces
t = direct_sum(flip_unitary().scaled(3), right_shift(2))
na = norm_attaining_check(t)
m, mstar = compute_M_and_Mstar(t)
print("norm attaining:", na.status, "| M dim:", m.dim(), "M* dim:", mstar.dim())

# a declared strictly increasing diagonal approaches its supremum without
# attaining it, and carries infinitely many points below the essential
# minimum: not absolutely norm attaining
inc = diag_operator([], rule=RationalFn.const(1) + RationalFn.power_term(-1, 1, 1))
print("norm attaining (increasing tail):", norm_attaining_check(inc).status)
print("absolutely norm attaining (increasing tail):", an_check(inc).status)

# the second worked example: the adjoint is hyponormal (certified through
# the exact entry rules) but fails the essential-spectrum criterion
t2 = example2()
print("hyponormal(adjoint of example 2):",
      hyponormal_check(adjoint(t2)).status)
print("an(adjoint of example 2):", an_check(adjoint(t2)).status)
