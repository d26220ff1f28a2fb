"""Uniform grids on [0, d], quadrature weights and the discrete L2 inner product."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from numpy.typing import NDArray


class GridMismatchError(ValueError):
    """Raised when two sampled objects live on different grids."""


@dataclass(frozen=True)
class Grid:
    """Closed uniform grid ``x_i = i*h`` on ``[0, d]`` with ``h = d/(n-1)``."""

    d: float
    n: int

    @property
    def h(self) -> float:
        return self.d / (self.n - 1)

    @cached_property
    def nodes(self) -> NDArray[np.float64]:
        x = np.arange(self.n, dtype=float) * self.h
        x[-1] = self.d
        return x

    def describe(self) -> dict:
        return {"d": self.d, "n": self.n}


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Positive weights on a grid; ``order`` is 2 for trapezoid, 4 for Simpson."""

    grid: Grid
    weights: NDArray[np.float64]
    order: int

    @property
    def kind(self) -> str:
        return {2: "trapezoid", 4: "simpson"}[self.order]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadratureRule):
            return NotImplemented
        return self.grid == other.grid and self.order == other.order

    def __hash__(self) -> int:
        return hash((self.grid, self.order))

    def describe(self) -> dict:
        return {**self.grid.describe(), "rule": self.kind}


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex node values of a function on a grid."""

    grid: Grid
    values: NDArray[np.complex128]

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.n,):
            raise ValueError(
                f"expected {self.grid.n} node values, got shape {self.values.shape}"
            )

    def __add__(self, other: SampledFunction) -> SampledFunction:
        _check_same_grid(self.grid, other.grid)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other: SampledFunction) -> SampledFunction:
        _check_same_grid(self.grid, other.grid)
        return SampledFunction(self.grid, self.values - other.values)

    def __mul__(self, c: complex) -> SampledFunction:
        return SampledFunction(self.grid, c * self.values)

    __rmul__ = __mul__

    def conj(self) -> SampledFunction:
        return SampledFunction(self.grid, self.values.conj())


def _check_same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


def make_grid(d: float, n: int) -> Grid:
    if not d > 0:
        raise ValueError(f"interval width must be positive, got d={d}")
    if n < 3 or n % 2 == 0:
        raise ValueError(f"node count must be odd and >= 3, got n={n}")
    return Grid(float(d), int(n))


def simpson_rule(grid: Grid) -> QuadratureRule:
    """Composite Simpson weights ``h/3 * [1, 4, 2, 4, ..., 4, 1]``."""
    if grid.n % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number of nodes")
    w = np.full(grid.n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return QuadratureRule(grid, w * grid.h / 3.0, order=4)


def trapezoid_rule(grid: Grid) -> QuadratureRule:
    w = np.full(grid.n, grid.h)
    w[0] = w[-1] = grid.h / 2.0
    return QuadratureRule(grid, w, order=2)


def make_rule(grid: Grid, kind: str = "simpson") -> QuadratureRule:
    if kind == "simpson":
        return simpson_rule(grid)
    if kind == "trapezoid":
        return trapezoid_rule(grid)
    raise ValueError(f"unknown quadrature rule {kind!r}")


def sample(f: Callable[[NDArray[np.float64]], NDArray], grid: Grid) -> SampledFunction:
    values = np.asarray(f(grid.nodes), dtype=complex)
    if values.shape == ():
        values = np.full(grid.n, values, dtype=complex)
    return SampledFunction(grid, values)


def inner_product(f: SampledFunction, g: SampledFunction, rule: QuadratureRule) -> complex:
    """Discrete ``(f, g) = sum_i w_i conj(f_i) g_i``, antilinear in ``f``."""
    _check_same_grid(f.grid, g.grid)
    _check_same_grid(f.grid, rule.grid)
    return complex(np.sum(rule.weights * f.values.conj() * g.values))


def norm(f: SampledFunction, rule: QuadratureRule) -> float:
    _check_same_grid(f.grid, rule.grid)
    return float(np.sqrt(np.sum(rule.weights * np.abs(f.values) ** 2)))


def integrate(values: NDArray, rule: QuadratureRule) -> complex:
    return complex(np.sum(rule.weights * values))
