"""The metric operator built two ways, plus its square root and the Hermitized Hamiltonian."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .model import ModelParams, adjoint_eigenfunction, chi_neumann, is_degenerate
from .operators import (
    COMPOSED,
    LinOperator,
    assemble_hamiltonian,
    compose,
    green_dirichlet,
    green_neumann_reduced,
    identity,
    nystrom,
    p_green_dirichlet,
    pstar_green_neumann,
    rank_one,
    scale,
)
from .quadrature import Grid, QuadratureRule, sample, trapezoid_rule

NEGATIVE_TOL = 1e-10
SYMMETRY_TOL = 1e-6


class NotPositiveError(ValueError):
    """The operator has an eigenvalue below ``-NEGATIVE_TOL``."""


class NotSymmetricError(ValueError):
    """The operator is not symmetric in the quadrature inner product."""


@dataclass(frozen=True)
class MetricBuild:
    params: ModelParams
    method: str
    operator: LinOperator
    m: Optional[int] = None

    @property
    def label(self) -> str:
        return f"series(m={self.m})" if self.method == "series" else self.method


def _sampled_adjoint(params: ModelParams, j: int, grid: Grid):
    # degeneracy is reported by the callers, not per sample
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return sample(adjoint_eigenfunction(params, j), grid)


def _rule(grid: Grid, rule: Optional[QuadratureRule]) -> QuadratureRule:
    return rule if rule is not None else trapezoid_rule(grid)


def adjoint_eigenbasis(params: ModelParams, grid: Grid, m: int) -> NDArray[np.complex128]:
    """Columns ``phi_0 .. phi_m`` sampled on the grid."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cols = [adjoint_eigenfunction(params, j)(grid.nodes) for j in range(m + 1)]
    return np.stack(cols, axis=1)


def metric_series(
    params: ModelParams, grid: Grid, rule: Optional[QuadratureRule] = None, m: int = 200
) -> LinOperator:
    """Truncated spectral sum ``sum_{j<=m} phi_j (phi_j, .)``."""
    if m < 0:
        raise ValueError("truncation order must be >= 0")
    rule = _rule(grid, rule)
    phi = adjoint_eigenbasis(params, grid, m)
    mat = phi @ (phi.conj() * rule.weights[:, None]).T
    return LinOperator(grid, rule, mat, "nystrom-kernel")


def theta_components(
    params: ModelParams, grid: Grid, rule: Optional[QuadratureRule] = None
) -> tuple[LinOperator, LinOperator, LinOperator, LinOperator]:
    """``(P0, T0, T1, T2)`` with ``Theta = P0 + T0 + alpha*T1 + alpha^2*T2``.

    ``P0`` projects onto ``phi_0``, ``T0 = I - P_0^N``, ``T1`` is the sum of the two
    momentum-composed resolvents and ``T2`` the Dirichlet resolvent.
    """
    rule = _rule(grid, rule)
    d = params.d
    phi0 = _sampled_adjoint(params, 0, grid)
    chi0 = sample(chi_neumann(0, d), grid)
    p0 = rank_one(phi0, phi0, rule)
    t0 = identity(grid, rule) - rank_one(chi0, chi0, rule)
    t1 = nystrom(p_green_dirichlet(d), grid, rule) + nystrom(pstar_green_neumann(d), grid, rule)
    t2 = nystrom(green_dirichlet(d), grid, rule)
    return p0, t0, t1, t2


def metric_closed(
    params: ModelParams, grid: Grid, rule: Optional[QuadratureRule] = None
) -> LinOperator:
    """Closed resolvent form of the metric.

    ``I + P_0^alpha - P_0^N + alpha p (-Lap_D)^-1 + alpha p* (-Lap_N^perp)^-1
    + alpha^2 (-Lap_D)^-1``. The two projectors are subtracted before adding
    the identity so that ``alpha = 0`` gives the identity matrix exactly.
    """
    rule = _rule(grid, rule)
    d, a = params.d, params.alpha
    phi0 = _sampled_adjoint(params, 0, grid)
    chi0 = sample(chi_neumann(0, d), grid)
    projectors = rank_one(phi0, phi0, rule) - rank_one(chi0, chi0, rule)
    theta = identity(grid, rule) + projectors
    theta = theta + scale(a, nystrom(p_green_dirichlet(d), grid, rule))
    theta = theta + scale(a, nystrom(pstar_green_neumann(d), grid, rule))
    theta = theta + scale(a * a, nystrom(green_dirichlet(d), grid, rule))
    return LinOperator(grid, rule, theta.matrix, COMPOSED)


def build_metric(
    params: ModelParams,
    grid: Grid,
    method: str,
    rule: Optional[QuadratureRule] = None,
    m: int = 200,
) -> MetricBuild:
    if method == "closed":
        return MetricBuild(params, method, metric_closed(params, grid, rule))
    if method == "series":
        return MetricBuild(params, method, metric_series(params, grid, rule, m), m)
    raise ValueError(f"unknown metric method {method!r}")


def weighted_eigh(
    theta: LinOperator, rule: Optional[QuadratureRule] = None
) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Eigenpairs of ``W^1/2 Theta W^-1/2`` (Hermitian part), ascending.

    Raises ``NotSymmetricError`` when the relative anti-Hermitian part exceeds
    ``SYMMETRY_TOL``.
    """
    rule = rule or theta.rule
    b = _symmetrized(theta, rule)
    scale_ = np.linalg.norm(b)
    if scale_ > 0 and np.linalg.norm(b - b.conj().T) > SYMMETRY_TOL * scale_:
        raise NotSymmetricError("operator is not symmetric in the weighted inner product")
    return np.linalg.eigh(0.5 * (b + b.conj().T))


def _symmetrized(theta: LinOperator, rule: QuadratureRule) -> NDArray[np.complex128]:
    s = np.sqrt(rule.weights)
    return s[:, None] * theta.matrix / s[None, :]


def metric_sqrt(
    theta: LinOperator, rule: Optional[QuadratureRule] = None, inverse: bool = False
) -> LinOperator:
    """Nonnegative square root ``Omega`` of a weighted-positive operator.

    With ``inverse=True`` return ``Omega^-1`` from the same eigendecomposition
    (reciprocal square roots); this fails on a singular operator.
    """
    rule = rule or theta.rule
    lam, u = weighted_eigh(theta, rule)
    if lam[0] < -NEGATIVE_TOL:
        raise NotPositiveError(f"minimum eigenvalue {lam[0]:.3e} is negative")
    if lam[0] < 0:
        warnings.warn(f"clamping eigenvalue {lam[0]:.3e} to zero", RuntimeWarning)
        lam = np.maximum(lam, 0.0)
    if inverse:
        if lam[0] == 0:
            raise NotPositiveError("operator is singular; no inverse square root")
        root = 1.0 / np.sqrt(lam)
    else:
        root = np.sqrt(lam)
    b = (u * root[None, :]) @ u.conj().T
    s = np.sqrt(rule.weights)
    return LinOperator(theta.grid, rule, b * s[None, :] / s[:, None], COMPOSED)


def hermitize(
    params: ModelParams,
    grid: Grid,
    rule: Optional[QuadratureRule] = None,
    modes: int = 10,
) -> tuple[LinOperator, float]:
    """Similarity transform ``h = Omega H Omega^-1`` with ``Omega^2 = Theta``.

    Returns ``h`` and the relative weighted distance between ``h`` and its
    weighted adjoint on the span of the ``modes`` lowest eigenvectors of ``h``.
    """
    if is_degenerate(params):
        raise ValueError("hermitization needs non-degenerate parameters")
    rule = _rule(grid, rule)
    theta = metric_closed(params, grid, rule)
    omega = metric_sqrt(theta, rule)
    omega_inv = metric_sqrt(theta, rule, inverse=True)
    ham = assemble_hamiltonian(params, grid)
    h = compose(omega, compose(ham, omega_inv))
    h = LinOperator(grid, rule, h.matrix, COMPOSED)
    return h, restricted_hermiticity_residual(h, modes)


def restricted_hermiticity_residual(h: LinOperator, modes: int = 10) -> float:
    """``|Q^H (B - B^H) Q| / |Q^H B Q|`` with ``B = W^1/2 h W^-1/2``.

    ``Q`` is an orthonormal basis of the weighted images of the ``modes``
    eigenvectors of ``h`` with smallest real part.
    """
    b = h.symmetrized()
    lam, v = np.linalg.eig(b)
    order = np.lexsort((lam.imag, lam.real))[:modes]
    q, _ = np.linalg.qr(v[:, order])
    inner = q.conj().T @ b @ q
    denom = np.linalg.norm(inner, 2)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(inner - inner.conj().T, 2) / denom)
