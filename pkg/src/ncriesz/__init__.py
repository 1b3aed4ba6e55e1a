"""Numerics for Riesz transforms, cocycles and Fourier multipliers on
group von Neumann algebras, with Euclidean grid calculus and free-group
branch analysis."""

__version__ = "0.1.0"

from .groups import (
    FiniteGroup,
    FreeGroupBall,
    build_cyclic,
    build_free_ball,
    build_from_table,
    prefix_geq,
    word_length,
)
from .group_algebra import (
    AlgebraElement,
    conditional_expectation_subgroup,
    fourier_multiplier,
    lp_norm,
    moment_norm_free,
    regular_rep_matrix,
)
from .cocycles import (
    Cocycle,
    LengthFunction,
    build_cocycle_gns,
    cyclic_word_cocycle,
    fractional_length,
    free_word_cocycle,
    functional_from_length,
    gromov_form,
    is_conditionally_negative,
    length_from_density,
    schoenberg_check,
)
from .riesz import (
    CrossedElement,
    apply_riesz,
    delta,
    delta_adjoint,
    expectation_col,
    expectation_row,
    extended_riesz,
    g_function_norm,
    gradient_form,
    gram_norm,
    riesz_equivalence_report,
    riesz_symbol,
    square_function_norm,
    twisted_family,
)
from .gaussian import (
    GaussianSample,
    gp_norm_mc,
    khintchine_report,
    pisier_scalar_check,
    rcp_norm,
    realize_crossed,
)
from .euclidean import (
    GridFunction,
    PartitionOfUnity,
    band_sobolev_norm,
    band_sobolev_report,
    carre_poisson,
    classical_sobolev_norm,
    d_alpha,
    limiting_length,
    log_weighted_besov_norm,
    meyer_poisson_report,
    poisson_apply,
    symbol_isometry_check,
    window_sobolev_sup,
)
from .branches import (
    Branch,
    branch_lp_family,
    branch_square_report,
    greedy_branch_partition,
    hm_branch_condition,
    ht_vector,
    project_branch,
)
