"""alpha-determinants and alpha-determinantal point processes on finite spaces."""
from .alpha_det import (
    AlphaClass,
    AlphaParam,
    alpha_det,
    alpha_det_block,
    alpha_det_enum,
    alpha_det_fast,
    cycle_class_sums,
    falling_factorial,
    ones_alpha_det,
    single_cycle_sum,
)
from .distribution import (
    PmfTable,
    SampleBatch,
    factorial_moment,
    janossy_weight,
    pgf,
    pmf_table,
    sample,
    superpose_sample,
    thin,
    validate_moments,
)
from .divisibility import check_divisible, check_divisible_symmetric, nfold_component
from .existence import (
    Verdict,
    Witness,
    check_existence,
    check_negative_alpha,
    check_positive_alpha,
    check_selfadjoint,
    scaled_equivalence,
    spectral_check,
)
from .operators import (
    KernelMatrix,
    block_expand,
    expansion_coefficient,
    fredholm_det,
    j_kernel,
    restrict,
    verify_expansion,
)

__version__ = "0.1.0"
