from .config import AUTO, SolverConfig, SolverReport, noise_target
from .fista import (
    Problem,
    fista,
    fixed_point_residual,
    grad_f,
    ista,
    l21_norm,
    objective,
    prox_g,
    prox_l21,
    solve,
)
from .pipeline import cls_reconstruct
from .search import default_bracket, lambda_search

__all__ = [
    "AUTO",
    "Problem",
    "SolverConfig",
    "SolverReport",
    "cls_reconstruct",
    "default_bracket",
    "fista",
    "fixed_point_residual",
    "grad_f",
    "ista",
    "l21_norm",
    "lambda_search",
    "noise_target",
    "objective",
    "prox_g",
    "prox_l21",
    "solve",
]
