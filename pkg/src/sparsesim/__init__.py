"""Classical simulation of quantum circuits with sparse output distributions.

The library reconstructs the measured output distribution (and, for full
measurements, the output state itself) of circuits of the form U2 * U1 using
only Born samples and amplitude queries against the prepared state, plus a
dense brute-force oracle for verification at small widths.
"""

from ._version import VERSION as __version__
from .bits import MAX_BITS, BitString, bits_to_str
from .circuits import (
    CircuitSpec,
    FunctionRecipe,
    IqpRecipe,
    ProductBlock,
    ProductRecipe,
    QftBlock,
    QftThenReversible,
    as_unitary,
    basis_preimage_state,
    basis_vector_state,
    build_ct_state,
    dual_measurement_block,
)
from .estimator import (
    Estimate,
    EstimationParams,
    chernoff_count,
    chernoff_mean,
    lift_partial_overlap,
    overlap,
    overlap_count,
    overlap_with_op,
    partial_overlap,
)
from .kmsearch import HeavyHitterList, km_search, probe_count
from .marginals import (
    CTMarginalOracle,
    ExactMarginalOracle,
    SamplingMarginalOracle,
    fourier_marginal,
    measured_marginal,
    point_probability,
    product_marginal,
)
from .oracle import (
    ct_dense_vector,
    dense_output,
    dense_prepared,
    exact_distribution,
    exact_prefix_marginal,
    prefix_marginal_table,
    verify_fourier_conjugation,
)
from .reconstruct import (
    DistributionResult,
    ReconstructionParams,
    StateResult,
    WeightReport,
    reconstruct_distribution,
    reconstruct_state,
    significant_weights,
)
from .rng import RngStream
from .schema import CircuitModel, CircuitParseError, parse_circuit
from .sparse import (
    SparseDistribution,
    SparseState,
    l1_distance,
    l2_distance,
    normalize,
    sample_sparse,
    tail_after_top,
    threshold_restrict,
    truncate_top,
    truncate_top_state,
)
from .states import (
    BasisState,
    CTState,
    ExplicitState,
    FunctionState,
    IqpState,
    OpImageState,
    PermutedState,
    ProductState,
    QftImageState,
    TensorPair,
    tensor,
)

__all__ = [
    "__version__",
    "MAX_BITS",
    "BitString",
    "bits_to_str",
    "CircuitSpec",
    "FunctionRecipe",
    "IqpRecipe",
    "ProductBlock",
    "ProductRecipe",
    "QftBlock",
    "QftThenReversible",
    "as_unitary",
    "basis_preimage_state",
    "basis_vector_state",
    "build_ct_state",
    "dual_measurement_block",
    "Estimate",
    "EstimationParams",
    "chernoff_count",
    "chernoff_mean",
    "lift_partial_overlap",
    "overlap",
    "overlap_count",
    "overlap_with_op",
    "partial_overlap",
    "HeavyHitterList",
    "km_search",
    "probe_count",
    "CTMarginalOracle",
    "ExactMarginalOracle",
    "SamplingMarginalOracle",
    "fourier_marginal",
    "measured_marginal",
    "point_probability",
    "product_marginal",
    "ct_dense_vector",
    "dense_output",
    "dense_prepared",
    "exact_distribution",
    "exact_prefix_marginal",
    "prefix_marginal_table",
    "verify_fourier_conjugation",
    "DistributionResult",
    "ReconstructionParams",
    "StateResult",
    "WeightReport",
    "reconstruct_distribution",
    "reconstruct_state",
    "significant_weights",
    "RngStream",
    "CircuitModel",
    "CircuitParseError",
    "parse_circuit",
    "SparseDistribution",
    "SparseState",
    "l1_distance",
    "l2_distance",
    "normalize",
    "sample_sparse",
    "tail_after_top",
    "threshold_restrict",
    "truncate_top",
    "truncate_top_state",
    "BasisState",
    "CTState",
    "ExplicitState",
    "FunctionState",
    "IqpState",
    "OpImageState",
    "PermutedState",
    "ProductState",
    "QftImageState",
    "TensorPair",
    "tensor",
]
