"""embedlab: a desk-scale laboratory for nonlinear embedding experiments.

Subpackages cover the embedding moduli and map taxonomy (metric_core),
explicit constructions with exact phase arithmetic (constructions), the
metric-cotype functional on discrete tori (cotype), the interlacing graph
and finite Property-Q testing (interlacing), and negative-type kernel
embeddings (kernels). The cli module binds everything into a batch harness
with deterministic seeding.
"""

__version__ = "0.1.0"

from .metric_core import (
    ClassifyParams,
    FiniteMetricSpace,
    ModulusProfile,
    NormedPoint,
    SampledMap,
    TaxonomyReport,
    ViolationError,
    classify,
    compression_moduli,
    expansion_modulus,
    extract_net,
    net_transfer_check,
    uniform_bins,
)
from .constructions import (
    AmplificationConfig,
    CocycleConfig,
    RationalScalar,
    TorusWitnessConfig,
    affine_action,
    amplified_distance,
    amplify,
    cocycle_eval,
    cocycle_norm,
    cocycle_norm_checks,
    cocycle_solvency_witness,
    linfty_lift,
    torus_witness,
    witness_lattice,
)
from .cotype import (
    AnnealingParams,
    CotypeInstance,
    FiniteTarget,
    LatticeFunction,
    NormedTarget,
    cotype_check,
    cotype_lhs,
    cotype_rhs_integral,
    mq_exhaustive,
    mq_lower_bound,
    mq_witness_search,
)
from .interlacing import (
    InterlacingGraph,
    PropertyQInstance,
    interlaces,
    pk_distance,
    property_q_test,
)
from .kernels import (
    EmbeddingResult,
    KernelMatrix,
    exp_positive_definite_check,
    holder_solvent_transform,
    is_negative_definite,
    schoenberg_embed,
    snowflake_kernel,
    squared_distance_kernel,
)
