import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptmetric.model import ModelParams, chi_dirichlet, chi_neumann, rho
from ptmetric.quadrature import (
    GridMismatchError,
    SampledFunction,
    inner_product,
    make_grid,
    norm,
    sample,
    simpson_rule,
    trapezoid_rule,
)

odd_n = st.integers(min_value=1, max_value=200).map(lambda k: 2 * k + 1)
lengths = st.floats(min_value=0.1, max_value=20.0)


def test_grid_nodes():
    g = make_grid(math.pi, 5)
    np.testing.assert_allclose(g.nodes, [0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi])
    assert make_grid(1.0, 3).h == 0.5


@pytest.mark.parametrize("n", [4, 1, 2, 0])
def test_grid_rejects_bad_n(n):
    with pytest.raises(ValueError):
        make_grid(math.pi, n)


def test_grid_rejects_nonpositive_width():
    with pytest.raises(ValueError):
        make_grid(0.0, 5)


@given(lengths, odd_n)
def test_grid_invariants(d, n):
    g = make_grid(d, n)
    assert g.nodes[0] == 0.0 and g.nodes[-1] == d
    assert np.all(np.diff(g.nodes) > 0)


@given(lengths, odd_n)
def test_weights_positive_and_sum_to_width(d, n):
    g = make_grid(d, n)
    for rule in (simpson_rule(g), trapezoid_rule(g)):
        assert np.all(rule.weights > 0)
        assert abs(rule.weights.sum() - d) <= 1e-12 * d


def test_simpson_sine_integral():
    # per panel Simpson gives (h/3) sin(c) (4 + 2 cos h) against the exact 2 sin(c) sin(h),
    # so the composite sum over [0, pi] is exactly 2h(2 + cos h) / (3 sin h)
    g = make_grid(math.pi, 33)
    h = g.h
    got = np.sum(simpson_rule(g).weights * np.sin(g.nodes))
    assert got == pytest.approx(2 * h * (2 + math.cos(h)) / (3 * math.sin(h)), rel=1e-14)
    assert abs(got - 2.0) <= 2e-6
    g = make_grid(math.pi, 129)
    assert abs(np.sum(simpson_rule(g).weights * np.sin(g.nodes)) - 2.0) <= 1e-8


def test_constant_integrates_to_width():
    g = make_grid(2.5, 9)
    assert np.sum(simpson_rule(g).weights) == pytest.approx(2.5, rel=1e-15)


@given(lengths, odd_n, st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_simpson_exact_on_cubics(d, n, c):
    g = make_grid(d, n)
    x = g.nodes
    approx = np.sum(simpson_rule(g).weights * (c[0] + c[1] * x + c[2] * x**2 + c[3] * x**3))
    exact = c[0] * d + c[1] * d**2 / 2 + c[2] * d**3 / 3 + c[3] * d**4 / 4
    scale = sum(abs(ci) * d ** (i + 1) for i, ci in enumerate(c)) + 1e-300
    assert abs(approx - exact) <= 1e-12 * scale


def test_simpson_fourth_order_on_oscillatory_integrand():
    alpha, d = 0.5, math.pi
    exact = (np.exp(1j * alpha * d) - 1) / (1j * alpha)
    errs = []
    for n in (65, 129, 257):
        g = make_grid(d, n)
        errs.append(abs(np.sum(simpson_rule(g).weights * np.exp(1j * alpha * g.nodes)) - exact))
    assert errs[0] / errs[1] >= 12 and errs[1] / errs[2] >= 12


def test_sample_basics():
    g = make_grid(math.pi, 17)
    np.testing.assert_allclose(sample(chi_neumann(0, math.pi), g).values, 1 / math.sqrt(math.pi))
    assert np.all(sample(rho(ModelParams(0.0)), g).values == 0)
    assert sample(chi_dirichlet(1, math.pi), g).values[0] == 0


def test_sample_length_invariant():
    g = make_grid(1.0, 5)
    with pytest.raises(ValueError):
        SampledFunction(g, np.zeros(4, dtype=complex))


def test_inner_product_examples():
    d = math.pi
    g = make_grid(d, 257)
    r = simpson_rule(g)
    c0 = sample(chi_neumann(0, d), g)
    assert abs(inner_product(c0, c0, r) - 1) <= 1e-10
    assert abs(inner_product(sample(chi_neumann(1, d), g), sample(chi_dirichlet(1, d), g), r)) <= 1e-10
    # (rho_1, chi_0) = (1/d) * int_0^pi (exp(-ix) - 1) dx = (1/pi) * (-2i - pi)
    expected = (-2j - math.pi) / math.pi
    got = inner_product(sample(rho(ModelParams(1.0, d)), g), c0, r)
    assert abs(got - expected) <= 1e-8


def test_inner_product_grid_mismatch():
    a, b = make_grid(1.0, 5), make_grid(1.0, 7)
    with pytest.raises(GridMismatchError):
        inner_product(SampledFunction(a, np.ones(5, complex)), SampledFunction(b, np.ones(7, complex)),
                      simpson_rule(a))


vectors = st.lists(
    st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
    min_size=9, max_size=9,
)


@given(vectors, vectors)
def test_inner_product_hermitian_symmetry(u, v):
    g = make_grid(2.0, 9)
    r = simpson_rule(g)
    f, h = SampledFunction(g, np.array(u)), SampledFunction(g, np.array(v))
    a, b = inner_product(f, h, r), inner_product(h, f, r)
    assert abs(a - b.conjugate()) <= 1e-12 * (1 + abs(a))


@given(vectors)
def test_inner_product_positive(u):
    g = make_grid(2.0, 9)
    r = trapezoid_rule(g)
    f = SampledFunction(g, np.array(u))
    ip = inner_product(f, f, r)
    assert ip.real >= 0 and abs(ip.imag) <= 1e-15 * ip.real
    assert norm(f, r) == pytest.approx(math.sqrt(ip.real))
