"""Variable-length resolvability toolkit for finite-alphabet mixed sources.

Exact ball-minimum entropy constructions, uniform-random-number encoders,
budget-constrained fixed-to-variable codes, and the closed-form first- and
second-order rate formulas they converge to, all checkable at desk scale.
"""

from ._backend import BACKEND
from .code import (
    FVCode,
    FVRateReport,
    LengthPartition,
    MixedVLCode,
    VLCode,
    build_fv_code,
    build_mixed_vlcode,
    build_vlcode,
    fv_rate_iid,
    partition_lengths,
)
from .dist import (
    DMC,
    FiniteDist,
    IIDSpec,
    InvariantError,
    MixedSourceSpec,
    bernoulli,
    dmc_output,
    entropy,
    mixed_iid,
    mixture,
    product_extension,
    variational_distance,
)
from .rates import (
    RateReport,
    first_order_rate,
    gaussian_ccdf,
    q_inverse,
    second_order_rate,
    smooth_entropy_estimate,
    varentropy,
)
from .smooth import (
    AllocationResult,
    SmoothedResult,
    TruncationResult,
    TypeClassTable,
    allocate_budget,
    allocate_budget_grid,
    ball_members,
    ball_sample_stats,
    smooth_entropy_iid,
    smooth_entropy_mixed_iid,
    smooth_min_entropy_dist,
    split_smooth_entropy_grid,
    truncate_components,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DMC",
    "FiniteDist",
    "IIDSpec",
    "InvariantError",
    "MixedSourceSpec",
    "bernoulli",
    "dmc_output",
    "entropy",
    "mixed_iid",
    "mixture",
    "product_extension",
    "variational_distance",
    "SmoothedResult",
    "AllocationResult",
    "TruncationResult",
    "TypeClassTable",
    "smooth_min_entropy_dist",
    "smooth_entropy_iid",
    "smooth_entropy_mixed_iid",
    "allocate_budget",
    "allocate_budget_grid",
    "split_smooth_entropy_grid",
    "truncate_components",
    "ball_members",
    "ball_sample_stats",
    "LengthPartition",
    "VLCode",
    "MixedVLCode",
    "FVCode",
    "FVRateReport",
    "partition_lengths",
    "build_vlcode",
    "build_mixed_vlcode",
    "build_fv_code",
    "fv_rate_iid",
    "RateReport",
    "first_order_rate",
    "second_order_rate",
    "varentropy",
    "q_inverse",
    "gaussian_ccdf",
    "smooth_entropy_estimate",
]
