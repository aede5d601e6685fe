"""Self-similar solutions and Cauchy problems for even-order diffusion
equations with Hilfer time-fractional derivatives.

The public surface re-exports the main entry points of each module; see
the module docstrings for the contracts.
"""

from .cauchy import (
    InitialData,
    SolutionField,
    eq18_identity,
    kernel_exponent,
    solve,
    verify_initial_trace,
)
from .fracops import (
    EquationSpec,
    GeneralEquationSpec,
    general_residual,
    hilfer_derivative,
    pde_residual,
    rl_integral,
    x_derivative,
)
from .kernel import (
    KernelSpec,
    gamma_b,
    gamma_b_dx,
    gamma_b_grid,
    kernel_spec,
    lemma1_jump,
    truncation_radius,
)
from .selfsim import (
    CoefficientTable,
    SimilarityExponents,
    branch_residual,
    coefficients,
    eval_selfsimilar,
    eval_wright_case,
    similarity_exponents,
    wright_branch_seed,
)
from .specfun import (
    BOUND_RETURNED,
    CONVERGED,
    DecayBound,
    GenWrightParams,
    SeriesValue,
    WrightParams,
    decay_bound,
    decay_params,
    equation_roots,
    gen_wright,
    mittag_leffler,
    recip_gamma,
    wright_phi,
)

__all__ = [
    "BOUND_RETURNED",
    "CONVERGED",
    "CoefficientTable",
    "DecayBound",
    "EquationSpec",
    "GenWrightParams",
    "GeneralEquationSpec",
    "InitialData",
    "KernelSpec",
    "SeriesValue",
    "SimilarityExponents",
    "SolutionField",
    "WrightParams",
    "branch_residual",
    "coefficients",
    "decay_bound",
    "decay_params",
    "eq18_identity",
    "equation_roots",
    "eval_selfsimilar",
    "eval_wright_case",
    "gamma_b",
    "gamma_b_dx",
    "gamma_b_grid",
    "gen_wright",
    "general_residual",
    "hilfer_derivative",
    "kernel_exponent",
    "kernel_spec",
    "lemma1_jump",
    "mittag_leffler",
    "pde_residual",
    "recip_gamma",
    "rl_integral",
    "similarity_exponents",
    "solve",
    "truncation_radius",
    "verify_initial_trace",
    "wright_branch_seed",
    "wright_phi",
    "x_derivative",
]
