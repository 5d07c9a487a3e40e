"""Exact algebra, spectral summaries, predicate verdicts and decomposition
certificates for a closed class of bounded block operators on direct sums
of l2 and C^n: banded diagonal blocks with eventually-constant or
rule-governed diagonals plus finitely supported couplings."""

__version__ = "0.1.0"

from .scalars import Scalar, scalar_sqrt
from .ratfn import RationalFn
from .diagonals import DiagonalSeq
from .blocks import BandedBlock, DenseBlock, FiniteRankBlock
from .vectors import VectorExpr
from .operators import (L2, OperatorExpr, Space, adjoint, apply, combine,
                        corner_sizes, dense_window, direct_sum, finite,
                        identity_operator, multiply, ops_equal_exact, truncate,
                        zero_operator)
from .serialize import load, operator_to_json_dict, parse, serialize
from .subspaces import Subspace
from .jacobi import sym_eigen
from .spectral import (DiagonalizationResult, KernelDims, SpectralSummary,
                       Symbol, essential_spectrum, kernel_dims,
                       modulus_summary, positive_an_diagonalize,
                       positive_spectral_summary, summary_eigenspace, symbol)
from .predicates import (PredicateVerdict, an_check, compute_M_and_Mstar,
                         hyponormal_check, is_normal, norm_attaining_check,
                         paranormal_refute, revalidate_witness,
                         star_paranormal_check)
from .decomposition import (BlockInverse, DecompositionCertificate,
                            NormalityCertificate, block_upper_inverse,
                            certify_normal, coupling_vanishes,
                            invariance_check, m_star_equals_m_check,
                            peel_decompose, reducing_check, u_plus_d_view)
from .gallery import AuditReport, audit, build, example1, example2, theorem_form

__all__ = [name for name in dir() if not name.startswith("_")]
