"""Hessian-free line-search methods built on interpolation models enriched
with Hessian-vector products."""

from ._core import (
    AscentDirection,
    DegenerateGeometry,
    EmptyInput,
    Problem,
    SingularMatrix,
    ZeroGradient,
    __version__,
    alpha_from_sym,
    correct_z,
    cubic_search,
    descent_safeguard,
    fd_check,
    performance_profile,
    problem,
    problem_set,
    problems,
    recover_hessian,
    recover_newton_direction,
    solve,
    sym_from_alpha,
    truncated_cg,
    unit_ball_sample,
)

METHODS = ("inexact_newton", "hessian_model", "hessian_model_sparse", "newton_model")
