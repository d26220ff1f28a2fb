"""Metric operator of the PT-symmetric Robin Hamiltonian on an interval."""

from .metric import (
    MetricBuild,
    build_metric,
    hermitize,
    metric_closed,
    metric_series,
    metric_sqrt,
    theta_components,
)
from .model import (
    AnalyticFunction,
    ModelParams,
    adjoint_eigenfunction,
    chi_dirichlet,
    chi_neumann,
    exact_spectrum,
    hamiltonian_eigenfunction,
    is_degenerate,
    rho,
)
from .operators import (
    KernelFunction,
    LinOperator,
    assemble_hamiltonian,
    nystrom,
    rank_one,
)
from .quadrature import Grid, QuadratureRule, SampledFunction, make_grid, sample

__version__ = "0.1.0"
