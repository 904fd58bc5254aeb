"""A computational laboratory for twisted discrete dynamical systems on
finite-dimensional coefficient algebras: exact finite crossed-product models,
truncated regular representations over free groups, and certified averaging
bounds with numerical refutation monitoring.
"""

from .algebra import (AlgebraAction, AlgebraAutomorphism, AlgebraElement,
                      CoeffAlgebra, IdealDescriptor, IdealLattice,
                      TraceDescriptor, invariant_ideals, invariant_traces,
                      maximal_invariant_ideals)
from .averaging import (AveragingProcess, DecayTrace, SimpleAveraging,
                        apply_averaging, dixmier_reduce, hs_bound_check,
                        pcom_average, pcom_average_checked, ph_average,
                        powers_step, steps_to_reach)
from .cocycles import (TwistedSystem, TwoCocycle, ValidationReport,
                       builtin_cocycle, validate_system)
from .crossed import CrossedElement, adjoint, expectation, fourier, multiply
from .description import (SystemDescription, parse_description,
                          serialize_description, to_json)
from .errors import (DescriptionError, RefutationError, ResourceError,
                     TwistlabError, UsageError)
from .groups import (FiniteAction, Group, GroupElement, ball, ball_size,
                     conjugate, inv, mul, orbits, power)
from .powers import (PcomCertificate, PowersTriple, PrefixSet,
                     construct_pcom, construct_powers_triple, starts_with,
                     triple_movers, verify_largeness, verify_pcom)
from .rep import (NormEstimate, SparseOperator, TruncatedRep, Window,
                  adaptive_norm_lower, ball_norm_lower, build_rep,
                  lam_matrix, mult_operator, norm_lower, norm_upper_l1,
                  pi_matrix, proj_matrix, represent)
from .structure import (BlockStructure, MatrixModel, bijection_report,
                        block_decompose, ideal_pair, matrix_model,
                        orbit_decomposition, trace_correspondence)

__version__ = "0.1.0"
