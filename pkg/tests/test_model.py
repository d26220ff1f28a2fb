import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ptmetric.model import (
    DegenerateParametersWarning,
    ModelParams,
    adjoint_eigenfunction,
    chi_dirichlet,
    chi_neumann,
    exact_spectrum,
    hamiltonian_eigenfunction,
    is_degenerate,
    rho,
)
from ptmetric.quadrature import inner_product, make_grid, sample, simpson_rule

alphas = st.floats(min_value=-5, max_value=5, allow_nan=False)
widths = st.floats(min_value=0.2, max_value=10)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0.5, 0.0)
    with pytest.raises(ValueError):
        ModelParams(float("nan"), 1.0)


def test_exact_spectrum_examples():
    vals = [v for _, v in exact_spectrum(ModelParams(0.5, math.pi), 4)]
    np.testing.assert_allclose(vals, [0.25, 1, 4, 9], rtol=1e-15)
    vals = [v for _, v in exact_spectrum(ModelParams(0.0, math.pi), 4)]
    np.testing.assert_allclose(vals, [0, 1, 4, 9], rtol=1e-15)


def test_exact_spectrum_degenerate_keeps_both():
    eigs = exact_spectrum(ModelParams(1.0, math.pi), 3)
    assert [lab for lab, _ in eigs] == ["alpha-mode", "j=1", "j=2"]
    np.testing.assert_allclose([v for _, v in eigs], [1, 1, 4])


def test_exact_spectrum_count():
    with pytest.raises(ValueError):
        exact_spectrum(ModelParams(0.5), 0)


@given(alphas, widths, st.integers(1, 30))
def test_exact_spectrum_sorted_nonnegative(a, d, count):
    eigs = exact_spectrum(ModelParams(a, d), count)
    vals = [v for _, v in eigs]
    assert len(eigs) == count
    assert all(v >= 0 for v in vals)
    assert vals == sorted(vals)
    assert len({lab for lab, _ in eigs}) == count


def test_is_degenerate():
    assert is_degenerate(ModelParams(1.0, math.pi))
    assert is_degenerate(ModelParams(-2.0, math.pi))
    assert not is_degenerate(ModelParams(0.0, math.pi))
    assert not is_degenerate(ModelParams(0.5, math.pi))
    assert not is_degenerate(ModelParams(1.0 + 1e-9, math.pi))


def test_chi_values():
    d = math.pi
    assert chi_neumann(0, d)(0.7) == pytest.approx(1 / math.sqrt(math.pi))
    assert chi_neumann(1, d)(0.0) == pytest.approx(math.sqrt(2 / math.pi))
    assert chi_dirichlet(1, d)(math.pi / 2) == pytest.approx(math.sqrt(2 / math.pi))
    assert chi_dirichlet(3, d)(0.0) == 0
    with pytest.raises(ValueError):
        chi_dirichlet(0, d)
    with pytest.raises(ValueError):
        chi_neumann(-1, d)


def test_chi_orthonormality():
    d = math.pi
    g = make_grid(d, 257)
    r = simpson_rule(g)
    c2 = sample(chi_neumann(2, d), g)
    assert abs(inner_product(c2, c2, r) - 1) <= 1e-10
    assert abs(inner_product(sample(chi_dirichlet(1, d), g), sample(chi_dirichlet(2, d), g), r)) <= 1e-10


def test_rho_values():
    assert rho(ModelParams(0.3, 2.0))(0.0) == 0
    np.testing.assert_array_equal(rho(ModelParams(0.0, 2.0))(np.linspace(0, 2, 5)), 0)
    assert rho(ModelParams(1.0, math.pi))(math.pi) == pytest.approx(-2 / math.sqrt(math.pi))


def test_phi0_is_plane_wave():
    p = ModelParams(0.5, math.pi)
    x = np.linspace(0, math.pi, 11)
    np.testing.assert_allclose(adjoint_eigenfunction(p, 0)(x), np.exp(0.5j * x) / math.sqrt(math.pi),
                               rtol=1e-15)
    # the defining sum chi_0 + rho gives the same thing
    np.testing.assert_allclose(chi_neumann(0, p.d)(x) + rho(p)(x), adjoint_eigenfunction(p, 0)(x),
                               atol=1e-15)
    np.testing.assert_allclose(hamiltonian_eigenfunction(p, 0)(x), np.exp(-0.5j * x) / math.sqrt(math.pi),
                               rtol=1e-15)


@given(alphas, widths, st.integers(1, 20))
def test_phi_at_zero(a, d, j):
    assume(not is_degenerate(ModelParams(a, d)))
    assert adjoint_eigenfunction(ModelParams(a, d), j)(0.0) == pytest.approx(math.sqrt(2 / d))


@given(alphas, widths, st.integers(0, 20))
def test_boundary_conditions(a, d, j):
    p = ModelParams(a, d)
    assume(not is_degenerate(p))
    phi, psi = adjoint_eigenfunction(p, j), hamiltonian_eigenfunction(p, j)
    scale = 1 + abs(a) + p.k(j)
    for x in (0.0, d):
        # adjoint condition psi' - i alpha psi = 0, direct condition psi' + i alpha psi = 0
        assert abs(phi.derivative(x) - 1j * a * phi(x)) <= 1e-12 * scale * (1 + abs(a) / max(p.k(j), 1))
        assert abs(psi.derivative(x) + 1j * a * psi(x)) <= 1e-12 * scale * (1 + abs(a) / max(p.k(j), 1))


def test_alpha_zero_reduces_to_neumann():
    p = ModelParams(0.0, math.pi)
    x = np.linspace(0, math.pi, 9)
    for j in range(5):
        np.testing.assert_array_equal(hamiltonian_eigenfunction(p, j)(x), chi_neumann(j, p.d)(x))


def test_degenerate_warns():
    with pytest.warns(DegenerateParametersWarning):
        adjoint_eigenfunction(ModelParams(1.0, math.pi), 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        adjoint_eigenfunction(ModelParams(0.5, math.pi), 1)


@pytest.mark.parametrize("alpha", [0.5, 0.0, 1.7])
def test_rayleigh_quotients_reproduce_spectrum(alpha):
    p = ModelParams(alpha, math.pi)
    g = make_grid(p.d, 513)
    r = simpson_rule(g)
    for j in range(8):
        phi = sample(adjoint_eigenfunction(p, j), g)
        psi = hamiltonian_eigenfunction(p, j)
        hpsi = sample(lambda x: -psi.derivative(x, 2), g)
        q = inner_product(phi, hpsi, r) / inner_product(phi, sample(psi, g), r)
        e = alpha**2 if j == 0 else p.k(j) ** 2
        assert abs(q - e) <= 1e-8 * max(e, 1e-300) or (e == 0 and abs(q) <= 1e-12)


def test_missing_derivative_raises():
    from ptmetric.model import AnalyticFunction

    f = AnalyticFunction(lambda x: x)
    with pytest.raises(ValueError):
        f.derivative(0.0, 2)
