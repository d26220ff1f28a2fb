"""Dense operators on sampled functions.

Integral operators are assembled by the Nystrom method, ``A_ij = K(x_i, x_j) w_j``,
with local corrections for kernels that have a kink or a jump on the diagonal.
The Hamiltonian is a second-order finite-difference matrix with ghost-point
Robin closures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

from .model import AnalyticFunction, ModelParams
from .quadrature import (
    Grid,
    GridMismatchError,
    QuadratureRule,
    SampledFunction,
    trapezoid_rule,
)

NYSTROM = "nystrom-kernel"
FINITE_DIFFERENCE = "finite-difference"
COMPOSED = "composed"

CORRECTIONS = ("none", "symmetric", "pointwise")


@dataclass(frozen=True)
class KernelFunction:
    """Kernel ``K(x, y)`` that is smooth off the diagonal.

    ``func`` must broadcast and return the two-sided mean on ``x == y``.
    ``value_jump(x)`` is ``K(x, x+) - K(x, x-)`` and ``slope_jump(x)`` is
    ``dK/dy(x, x+) - dK/dy(x, x-)``; ``None`` means the kernel is continuous
    (respectively continuously differentiable) across the diagonal.
    """

    func: Callable[[NDArray, NDArray], NDArray]
    name: str
    value_jump: Optional[Callable[[NDArray], NDArray]] = None
    slope_jump: Optional[Callable[[NDArray], NDArray]] = None

    def __call__(self, x, y) -> NDArray[np.complex128]:
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return np.asarray(self.func(x, y), dtype=complex)

    def jumps(self, x: NDArray) -> tuple[NDArray, NDArray]:
        zero = np.zeros_like(x, dtype=complex)
        v = zero if self.value_jump is None else _full(self.value_jump(x), x)
        s = zero if self.slope_jump is None else _full(self.slope_jump(x), x)
        return v, s


def _full(values, x) -> NDArray[np.complex128]:
    return np.broadcast_to(np.asarray(values, dtype=complex), x.shape).copy()


@dataclass(frozen=True, eq=False)
class LinOperator:
    """Dense complex matrix acting on node values of one grid."""

    grid: Grid
    rule: QuadratureRule
    matrix: NDArray[np.complex128]
    kind: str

    def __post_init__(self) -> None:
        n = self.grid.n
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not fit n={n}")
        if self.rule.grid != self.grid:
            raise GridMismatchError("rule and operator live on different grids")

    def __call__(self, f: SampledFunction) -> SampledFunction:
        return apply(self, f)

    def __add__(self, other: LinOperator) -> LinOperator:
        return add(self, other)

    def __sub__(self, other: LinOperator) -> LinOperator:
        return add(self, scale(-1.0, other))

    def __matmul__(self, other: LinOperator) -> LinOperator:
        return compose(self, other)

    def __rmul__(self, c: complex) -> LinOperator:
        return scale(c, self)

    def kernel(self) -> NDArray[np.complex128]:
        """Recover ``K(x_i, x_j)`` from ``A_ij / w_j``."""
        return self.matrix / self.rule.weights[None, :]

    def weighted_adjoint(self) -> LinOperator:
        """Adjoint in the quadrature inner product: ``W^-1 A^H W``."""
        w = self.rule.weights
        m = self.matrix.conj().T * w[None, :] / w[:, None]
        return LinOperator(self.grid, self.rule, m, self.kind)

    def symmetrized(self) -> NDArray[np.complex128]:
        """``W^1/2 A W^-1/2``: Hermitian iff the operator is weighted-symmetric."""
        s = np.sqrt(self.rule.weights)
        return s[:, None] * self.matrix / s[None, :]

    def weighted_norm(self, ord: int | str = 2) -> float:
        return float(np.linalg.norm(self.symmetrized(), ord))


def _check_compatible(a: LinOperator, b: LinOperator) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


def identity(grid: Grid, rule: Optional[QuadratureRule] = None) -> LinOperator:
    rule = rule or trapezoid_rule(grid)
    return LinOperator(grid, rule, np.eye(grid.n, dtype=complex), COMPOSED)


def add(a: LinOperator, b: LinOperator) -> LinOperator:
    _check_compatible(a, b)
    kind = a.kind if a.kind == b.kind else COMPOSED
    return LinOperator(a.grid, a.rule, a.matrix + b.matrix, kind)


def scale(c: complex, a: LinOperator) -> LinOperator:
    return LinOperator(a.grid, a.rule, c * a.matrix, a.kind)


def compose(a: LinOperator, b: LinOperator) -> LinOperator:
    """``a`` after ``b``."""
    _check_compatible(a, b)
    return LinOperator(a.grid, a.rule, a.matrix @ b.matrix, COMPOSED)


def apply(a: LinOperator, f: SampledFunction) -> SampledFunction:
    if f.grid != a.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {f.grid}")
    return SampledFunction(a.grid, a.matrix @ f.values)


def rank_one(f: SampledFunction, g: SampledFunction, rule: QuadratureRule) -> LinOperator:
    """``h -> f * (g, h)``; Nystrom kernel ``f(x) conj(g(y))``."""
    if not (f.grid == g.grid == rule.grid):
        raise GridMismatchError("rank_one needs f, g and rule on one grid")
    m = np.outer(f.values, g.values.conj() * rule.weights)
    return LinOperator(rule.grid, rule, m, NYSTROM)


# -- kernels ---------------------------------------------------------------


def green_dirichlet(d: float) -> KernelFunction:
    """Inverse of the Dirichlet Laplacian: ``min(x,y) (d - max(x,y)) / d``."""
    return KernelFunction(
        lambda x, y: np.minimum(x, y) * (d - np.maximum(x, y)) / d,
        "green_dirichlet",
        slope_jump=lambda x: -1.0,
    )


def green_neumann_reduced(d: float) -> KernelFunction:
    """Neumann Laplacian inverse on mean-zero functions (zero mode removed)."""
    return KernelFunction(
        lambda x, y: d / 3.0 - np.maximum(x, y) + (x * x + y * y) / (2.0 * d),
        "green_neumann_reduced",
        slope_jump=lambda x: -1.0,
    )


def p_green_dirichlet(d: float) -> KernelFunction:
    """``-i d/dx`` of the Dirichlet Green function."""

    def k(x, y):
        out = np.where(x < y, -1j * (d - y) / d, 1j * y / d)
        return np.where(x == y, -1j * (d - 2.0 * y) / (2.0 * d), out)

    return KernelFunction(k, "p_green_dirichlet", value_jump=lambda x: -1j)


def pstar_green_neumann(d: float) -> KernelFunction:
    """``-i d/dx`` of the reduced Neumann Green function."""

    def k(x, y):
        step = np.where(x > y, 1.0, np.where(x == y, 0.5, 0.0))
        return -1j * (x / d - step)

    return KernelFunction(k, "pstar_green_neumann", value_jump=lambda x: -1j)


# -- Nystrom assembly --------------------------------------------------------


def nystrom(
    kernel: KernelFunction,
    grid: Grid,
    rule: Optional[QuadratureRule] = None,
    correction: str = "symmetric",
) -> LinOperator:
    """Assemble ``A_ij = K(x_i, x_j) w_j`` plus diagonal-singularity corrections.

    Plain Nystrom sums lose accuracy where the integrand ``K(x_i, .) f`` has a
    kink or jump at ``y = x_i``. ``correction`` selects the remedy:

    ``"none"``
        Raw kernel times weights, two-sided mean on the diagonal.
    ``"symmetric"``
        Slope-jump term on the diagonal of every row. On the trapezoid rule a
        value jump ``V`` is handled by the Hermitian tridiagonal term
        ``+-h^2 V / 8`` (scaled by ``1/w_i``), which matches the endpoint rows
        exactly and leaves a smooth O(h^2) error. Weighted symmetry of a
        Hermitian kernel is preserved exactly.
    ``"pointwise"``
        One-sided diagonal values in the endpoint rows plus the full
        ``J = slope_jump * f + value_jump * f'`` correction with a
        finite-difference ``f'``. Higher pointwise accuracy, but the result is
        no longer weighted-symmetric when the kernel jumps.
    """
    if correction not in CORRECTIONS:
        raise ValueError(f"correction must be one of {CORRECTIONS}, got {correction!r}")
    rule = rule or trapezoid_rule(grid)
    if rule.grid != grid:
        raise GridMismatchError("rule belongs to a different grid")
    x, w, h, n = grid.nodes, rule.weights, grid.h, grid.n
    k = kernel(x[:, None], x[None, :])
    vjump, sjump = kernel.jumps(x)

    if correction == "pointwise":
        # outside the interval only one branch of the kernel is sampled
        k[0, 0] += vjump[0] / 2.0
        k[-1, -1] -= vjump[-1] / 2.0
    a = k * w[None, :]
    if correction == "none":
        return LinOperator(grid, rule, a, NYSTROM)

    if rule.order == 2:
        rows = np.arange(n)
        c = h * h / 12.0
    else:
        # Simpson is exact at even nodes; odd nodes carry the kink mid-panel
        rows = np.arange(1, n, 2)
        c = h * h / 6.0
    a[rows, rows] += c * sjump[rows]

    if correction == "symmetric":
        if rule.order == 2 and np.any(vjump != 0):
            t = h * h / 8.0 * 0.5 * (vjump[:-1] + vjump[1:])
            i = np.arange(n - 1)
            a[i, i + 1] += t / w[i]
            a[i + 1, i] -= t / w[i + 1]
    elif np.any(vjump != 0):
        a += (c * vjump)[:, None] * _first_difference(n, h) * _row_mask(rows, n)[:, None]
    return LinOperator(grid, rule, a, NYSTROM)


def _row_mask(rows: NDArray, n: int) -> NDArray:
    m = np.zeros(n)
    m[rows] = 1.0
    return m


def _first_difference(n: int, h: float) -> NDArray[np.float64]:
    """Second-order first-derivative matrix, one-sided at both ends."""
    dmat = np.zeros((n, n))
    i = np.arange(1, n - 1)
    dmat[i, i + 1] = 0.5
    dmat[i, i - 1] = -0.5
    dmat[0, :3] = [-1.5, 2.0, -0.5]
    dmat[-1, -3:] = [0.5, -2.0, 1.5]
    return dmat / h


# -- Hamiltonian ------------------------------------------------------------


def assemble_hamiltonian(params: ModelParams, grid: Grid) -> LinOperator:
    """Finite-difference ``-d^2/dx^2`` with Robin ghost-point closures.

    The ghost value outside each endpoint is eliminated with the centered
    derivative of ``psi' + i*alpha*psi = 0``. The attached rule is the
    trapezoid rule, in whose inner product the matrix for ``-alpha`` is
    exactly the adjoint of the matrix for ``alpha``.
    """
    if grid.n < 5:
        raise ValueError("finite-difference Hamiltonian needs n >= 5")
    n, h, a = grid.n, grid.h, params.alpha
    inv = 1.0 / (h * h)
    m = np.zeros((n, n), dtype=complex)
    i = np.arange(n)
    m[i, i] = 2.0 * inv
    m[i[:-1], i[:-1] + 1] = -inv
    m[i[1:], i[1:] - 1] = -inv
    m[0, 0] -= 2j * a / h
    m[0, 1] = -2.0 * inv
    m[-1, -1] += 2j * a / h
    m[-1, -2] = -2.0 * inv
    return LinOperator(grid, trapezoid_rule(grid), m, FINITE_DIFFERENCE)


def apply_hamiltonian_analytic(
    params: ModelParams, f: AnalyticFunction, grid: Grid
) -> SampledFunction:
    """Sample ``-f''`` from its closed form; no finite differencing."""
    return SampledFunction(grid, -f.derivative(grid.nodes, 2))
