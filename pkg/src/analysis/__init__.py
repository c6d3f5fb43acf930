"""Analysis modules."""

from src.analysis.beta_sieve import build_weights, weighted_density_sum
from src.analysis.exp_sums import dirichlet_approx, reconstruct_main_term
from src.analysis.gaussian import GaussianInteger, gaussian_factor_collision
from src.analysis.laboratory import Laboratory
from src.analysis.local_factors import rho, rho_quad, singular_series
from src.analysis.representations import build_ledger, r_star

__all__ = [
    "GaussianInteger",
    "Laboratory",
    "build_ledger",
    "build_weights",
    "dirichlet_approx",
    "gaussian_factor_collision",
    "r_star",
    "reconstruct_main_term",
    "rho",
    "rho_quad",
    "singular_series",
    "weighted_density_sum",
]
