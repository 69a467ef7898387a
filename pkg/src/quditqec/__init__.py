"""Block and convolutional error-correcting codes over N-level registers.

The package builds encoded-ket maps for a small family of codes, checks
the Knill-Laflamme recoverability condition over windowed error families
(in floating point or exact cyclotomic arithmetic), relates spin-flip and
phase-shift codes through register-wise Fourier duality, and demonstrates
end-to-end correction with a Monte-Carlo channel plus brute-force
maximum-likelihood recovery.
"""

from .channel import (ChannelConfig, ChannelSummary, TrialRecord,
                      UncorrectableError, decode_mld, run_trials,
                      sample_channel)
from .classical import RadiusCounterexample, RadiusReport, certify_radius
from .codes import (BUILTIN_LABELS, CodeSpec, MuMatrix, builtin,
                    classical_conv_encode, lower_bidiagonal_mu,
                    truncation_boundary)
from .cyclotomic import PhaseScalar
from .errors import (ErrorPattern, PatternFamily, SingleRegisterError,
                     additive_flip, apply_pattern, enumerate_family,
                     identity, iter_supports, phase_shift, spin_flip,
                     weyl, weyl_basis)
from .schemas import SCHEMA_VERSION, SCHEMAS
from .states import (RegisterState, dft_register, index_of_ket,
                     inner_product, ket_of_index, plus_state,
                     states_equal_up_to_phase)
from .transforms import dualize, paste, theorem2_pipeline
from .verifier import (KLReport, KLWitness, LambdaReport, VerificationError,
                       kl_check, lambda_matrix, reevaluate_witness)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_LABELS", "ChannelConfig", "ChannelSummary", "CodeSpec",
    "ErrorPattern", "KLReport", "KLWitness", "LambdaReport", "MuMatrix",
    "PatternFamily", "PhaseScalar", "RadiusCounterexample", "RadiusReport",
    "RegisterState", "SCHEMAS", "SCHEMA_VERSION", "SingleRegisterError",
    "TrialRecord", "UncorrectableError", "VerificationError",
    "additive_flip", "apply_pattern", "builtin", "certify_radius",
    "classical_conv_encode", "decode_mld", "dft_register", "dualize",
    "enumerate_family", "identity", "index_of_ket", "inner_product",
    "iter_supports", "ket_of_index", "kl_check", "lambda_matrix",
    "lower_bidiagonal_mu", "paste", "phase_shift", "plus_state",
    "reevaluate_witness", "run_trials", "sample_channel", "spin_flip",
    "states_equal_up_to_phase", "theorem2_pipeline", "truncation_boundary",
    "weyl", "weyl_basis",
]
