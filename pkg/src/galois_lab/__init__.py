"""Finite-level computations for p-adic Lie groups and the arithmetic criteria
used to build Galois representations with open image."""

from .padic import PadicContext, PadicMatrix, PadicScalar, val_p
from .lie import LieElement, bracket, bracket_closure, normalize_generators, standard_generators
from .uniform import (CongruenceSubgroupLevel, FiniteMatrixGroup, congruence_kernel, exp_mat,
                      generated_subgroup, log_mat, p_central_series, p_rank)
from .characters import (CharacterVector, adjoint_weights, cyclotomic_action, obstruction_dimension,
                         quadratic_action, verify_delta_action)
from .certificate import WitnessCertificate, build_witness, verify_certificate

__version__ = "0.1.0"
