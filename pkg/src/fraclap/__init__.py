"""Fractional Laplacian on an interval through Toeplitz matrices of ``|1 - e^{i theta}|^{2 alpha}``."""

__version__ = "0.1.0"

from .errors import (
    FracLapError,
    InvalidAlphaError,
    NotPositiveDefiniteError,
    NumericalError,
    QuadratureError,
)
from .kernels import (
    KernelEvaluator,
    KernelTable,
    green_G,
    green_row,
    kernel_H,
    kernel_K,
    tabulate,
)
from .operators import (
    GridFunction,
    PvQuadratureConfig,
    apply_discrete,
    reference_pv,
    rescale_interval,
    riesz_integral,
)
from .solver import (
    SolveReport,
    TestFunctionSpec,
    full_solve,
    residual_check,
    solve_discrete,
    solve_green,
    solve_riesz_correction,
)
from .symbol import AlphaParam, Regime, beta_coeff, c1_constant, c_alpha, phi_hat
from .toeplitz import (
    SymToeplitz,
    build,
    inverse_entry,
    levinson_solve,
    matvec,
    predictor,
    scaled_inverse_probe,
)
