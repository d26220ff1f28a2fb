"""Closed-form data of the Robin interval Hamiltonian.

``H_alpha = -d^2/dx^2`` on ``(0, d)`` with ``psi'(0) + i*alpha*psi(0) = 0`` and
``psi'(d) + i*alpha*psi(d) = 0``. Its adjoint is ``H_{-alpha}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

DEGENERACY_TOL = 1e-12

Evaluator = Callable[[NDArray[np.float64]], NDArray[np.complex128]]


class DegenerateParametersWarning(UserWarning):
    """alpha*d/pi is a nonzero integer, so two eigenvalues collide."""


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    d: float = math.pi

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.d)):
            raise ValueError("alpha and d must be finite")
        if self.d <= 0:
            raise ValueError(f"interval width must be positive, got d={self.d}")

    @property
    def degenerate(self) -> bool:
        return is_degenerate(self)

    def k(self, j: int) -> float:
        return j * math.pi / self.d

    def flipped(self) -> ModelParams:
        """Same interval, opposite sign of alpha (the adjoint problem)."""
        return ModelParams(-self.alpha, self.d)

    def describe(self) -> dict:
        return {"alpha": self.alpha, "d": self.d}


@dataclass(frozen=True)
class AnalyticFunction:
    """A complex function on ``[0, d]`` with optional closed-form derivatives."""

    value: Evaluator
    first: Optional[Evaluator] = None
    second: Optional[Evaluator] = None
    name: str = "f"

    def __call__(self, x: ArrayLike) -> NDArray[np.complex128]:
        return _as_complex(self.value, x)

    def derivative(self, x: ArrayLike, order: int = 1) -> NDArray[np.complex128]:
        fn = {0: self.value, 1: self.first, 2: self.second}.get(order)
        if fn is None:
            raise ValueError(f"{self.name}: no closed-form derivative of order {order}")
        return _as_complex(fn, x)

    def __add__(self, other: AnalyticFunction) -> AnalyticFunction:
        return _combine(self, other, 1.0, 1.0, f"{self.name}+{other.name}")

    def scaled(self, c: complex) -> AnalyticFunction:
        def pick(fn):
            return None if fn is None else (lambda x: c * fn(x))

        return AnalyticFunction(
            pick(self.value), pick(self.first), pick(self.second), f"{c}*{self.name}"
        )


def _as_complex(fn: Evaluator, x: ArrayLike) -> NDArray[np.complex128]:
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.asarray(fn(x), dtype=complex), x.shape).copy()


def _combine(f, g, a, b, name):
    def lin(p, q):
        if p is None or q is None:
            return None
        return lambda x: a * p(x) + b * q(x)

    return AnalyticFunction(
        lin(f.value, g.value), lin(f.first, g.first), lin(f.second, g.second), name
    )


def is_degenerate(params: ModelParams) -> bool:
    r = params.alpha * params.d / math.pi
    nearest = round(r)
    return nearest != 0 and abs(r - nearest) <= DEGENERACY_TOL


def exact_spectrum(params: ModelParams, count: int) -> list[tuple[str, float]]:
    """First ``count`` eigenvalues ``{alpha^2} U {k_j^2, j >= 1}`` in ascending order.

    Ties keep both entries; the alpha-mode is listed first.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    entries = [("alpha-mode", params.alpha**2)]
    entries += [(f"j={j}", params.k(j) ** 2) for j in range(1, count + 1)]
    entries.sort(key=lambda e: e[1])
    return entries[:count]


def chi_neumann(j: int, d: float) -> AnalyticFunction:
    if j < 0:
        raise ValueError("Neumann modes start at j=0")
    if j == 0:
        c = 1.0 / math.sqrt(d)
        zero = lambda x: np.zeros_like(x)
        return AnalyticFunction(lambda x: np.full_like(x, c), zero, zero, "chiN0")
    k = j * math.pi / d
    a = math.sqrt(2.0 / d)
    return AnalyticFunction(
        lambda x: a * np.cos(k * x),
        lambda x: -a * k * np.sin(k * x),
        lambda x: -a * k * k * np.cos(k * x),
        f"chiN{j}",
    )


def chi_dirichlet(j: int, d: float) -> AnalyticFunction:
    if j < 1:
        raise ValueError("Dirichlet modes start at j=1")
    k = j * math.pi / d
    a = math.sqrt(2.0 / d)
    return AnalyticFunction(
        lambda x: a * np.sin(k * x),
        lambda x: a * k * np.cos(k * x),
        lambda x: -a * k * k * np.sin(k * x),
        f"chiD{j}",
    )


def rho(params: ModelParams) -> AnalyticFunction:
    """``(exp(i*alpha*x) - 1)/sqrt(d)``."""
    a, s = params.alpha, 1.0 / math.sqrt(params.d)
    return AnalyticFunction(
        lambda x: s * (np.exp(1j * a * x) - 1.0),
        lambda x: s * 1j * a * np.exp(1j * a * x),
        lambda x: -s * a * a * np.exp(1j * a * x),
        "rho",
    )


def _warn_if_degenerate(params: ModelParams) -> None:
    if is_degenerate(params):
        warnings.warn(
            f"alpha*d/pi = {params.alpha * params.d / math.pi:.15g} is a nonzero "
            "integer; eigenvalues are not simple",
            DegenerateParametersWarning,
            stacklevel=3,
        )


def adjoint_eigenfunction(params: ModelParams, j: int) -> AnalyticFunction:
    """Eigenfunction ``phi_j`` of ``H_alpha^* = H_{-alpha}``, unnormalized.

    ``phi_0 = chi_0^N + rho_alpha`` and ``phi_j = chi_j^N + i(alpha/k_j) chi_j^D``.
    """
    _warn_if_degenerate(params)
    if j < 0:
        raise ValueError("mode index must be >= 0")
    if j == 0:
        # chi_0^N + rho_alpha collapses to exp(i*alpha*x)/sqrt(d)
        a, s = params.alpha, 1.0 / math.sqrt(params.d)
        return AnalyticFunction(
            lambda x: s * np.exp(1j * a * x),
            lambda x: s * 1j * a * np.exp(1j * a * x),
            lambda x: -s * a * a * np.exp(1j * a * x),
            "phi0",
        )
    c = 1j * params.alpha / params.k(j)
    n, dd = chi_neumann(j, params.d), chi_dirichlet(j, params.d)
    return _combine(n, dd, 1.0, c, f"phi{j}")


def hamiltonian_eigenfunction(params: ModelParams, j: int) -> AnalyticFunction:
    """Eigenfunction of ``H_alpha`` itself: the adjoint family at ``-alpha``."""
    _warn_if_degenerate(params)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateParametersWarning)
        return adjoint_eigenfunction(params.flipped(), j)
