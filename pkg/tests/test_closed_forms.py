import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from curvmo.closed_forms import (
    CROSS_PARAMETERS,
    Atom,
    CrossDensity,
    ProductKernel,
    TabulatedDensity,
    cross_density_eval,
    cross_density_moment_quadrature,
    cross_moment,
    cross_normalization,
    gr2rn_moment,
    kernel_moment,
    product_density,
    product_kernel_density,
    product_moment,
    product_moments,
    simplex_integral,
)
from curvmo.curvature import direct_sum, make_constant_curvature, make_zero, random_tensor
from curvmo.mc import mc_simplex
from curvmo.moments import psi_sequence, sup_sec_estimate


def binom(x, s):
    # independent generalized binomial: prod_{i<s} (x - i) / (i + 1)
    if s < 0:
        return Fraction(0)
    out = Fraction(1)
    for i in range(s):
        out *= (Fraction(x) - i) / (i + 1)
    return out


def cpn_moment(n, k):
    return sum(
        4**r * binom(Fraction(-1, 2), r) * binom(Fraction(-(2 * n - 2), 2), k - r) for r in range(k + 1)
    ) / binom(Fraction(-(2 * n - 1), 2), k)


def hpn_moment(n, k):
    return sum(
        4**r * binom(Fraction(-3, 2), r) * binom(Fraction(-(4 * n - 4), 2), k - r) for r in range(k + 1)
    ) / binom(Fraction(-(4 * n - 1), 2), k)


def op2_moment(k):
    return sum(4**r * binom(Fraction(-7, 2), r) * binom(-4, k - r) for r in range(k + 1)) / binom(
        Fraction(-15, 2), k
    )


def test_cross_moment_examples():
    assert cross_moment(0, 0, 1) == 2
    assert cross_moment(0, 0, 2) == Fraction(24, 5)
    assert cross_moment(3, 3, 1) == Fraction(12, 5)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("k", range(7))
def test_cross_family_matches_projective_space_sums(n, k):
    assert cross_moment(*CROSS_PARAMETERS["cpn"](n), k) == cpn_moment(n, k)
    assert cross_moment(*CROSS_PARAMETERS["hpn"](n), k) == hpn_moment(n, k)


@pytest.mark.parametrize("k", range(7))
def test_cross_family_matches_cayley_plane_sum(k):
    assert cross_moment(3, 3, k) == op2_moment(k)


def test_cross_moment_rejects_negative():
    with pytest.raises(ValueError):
        cross_moment(-1, 0, 1)


@pytest.mark.parametrize("a", range(5))
@pytest.mark.parametrize("b", range(5))
def test_density_normalised_by_algebraic_weight_quadrature(a, b):
    # scipy's QAWS rule integrates (s-1)^alpha (4-s)^beta exactly at the endpoints
    c = float(cross_normalization(a, b)) / 3 ** ((2 * a - 1) / 2) / 3**b
    value, _ = integrate.quad(lambda s: c, 1, 4, weight="alg", wvar=((2 * a - 1) / 2, b))
    assert abs(value - 1) < 1e-10


@pytest.mark.parametrize("a,b", [(0, 0), (1, 1), (3, 3), (2, 4)])
@pytest.mark.parametrize("k", [0, 2, 5])
def test_moment_quadrature_matches_exact(a, b, k):
    assert abs(cross_density_moment_quadrature(a, b, k) - float(cross_moment(a, b, k))) < 1e-10


def test_cayley_plane_prefactor():
    assert cross_normalization(3, 3) == Fraction(7, 6) * binom(Fraction(13, 2), 3)
    assert abs(cross_density_moment_quadrature(3, 3, 0) - 1) < 1e-12


def test_cross_density_pointwise():
    assert cross_density_eval(3, 3, 1.0) == 0.0
    assert cross_density_eval(1, 0, 4.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        cross_density_eval(0, 0, 0.5)
    with pytest.raises(ValueError):
        cross_density_eval(0, 0, 1.0)


def test_cross_density_positive_inside_support():
    d = CrossDensity(1, 2)
    s = np.linspace(1.01, 3.99, 50)
    assert all(d.pdf(v) > 0 for v in s)


def test_cross_density_nodes_reproduce_moments():
    d = CrossDensity(0, 1)
    s, w = d.nodes(48)
    for k in range(6):
        assert float(np.sum(w * s**k)) == pytest.approx(float(cross_moment(0, 1, k)), rel=1e-12)


def test_cross_density_abscissae_avoid_singularity():
    assert CrossDensity(0, 0).abscissae(10).min() > 1
    assert CrossDensity(3, 3).abscissae(10).min() == 1
    assert CrossDensity(3, 3).abscissae(10).max() == 4


def test_sup_estimate_approaches_four_from_below():
    seq = [cross_moment(1, 1, k) for k in range(21)]
    assert 3 < sup_sec_estimate(seq) < 4


def test_product_of_two_round_surfaces():
    ones = [1] * 4
    assert product_moment(ones, 2, ones, 2, 1) == Fraction(1, 3)
    assert product_moment(ones, 2, ones, 2, 2) == Fraction(7, 45)


def test_circle_times_three_sphere():
    circle = [1, 0, 0]
    ones = [1, 1, 1]
    assert product_moment(circle, 1, ones, 3, 1) == Fraction(1, 2)
    assert product_moment(circle, 1, ones, 3, 2) == Fraction(1, 3)


def test_product_with_flat_line_zeroth_moment():
    assert product_moment([1, 5, 7], 4, [1], 1, 0) == 1


def test_product_moment_needs_long_enough_sequences():
    with pytest.raises(ValueError):
        product_moment([1, 1], 3, [1, 1], 3, 2)


@pytest.mark.parametrize("m,n", [(2, 3), (3, 5), (1, 4), (4, 2)])
def test_product_moment_is_symmetric(m, n):
    a = [Fraction(1), Fraction(2, 3), Fraction(5, 7), Fraction(1, 2)]
    b = [Fraction(1), Fraction(-1, 4), Fraction(3, 2), Fraction(2)]
    if m == 1:
        a = [1, 0, 0, 0]
    for k in range(4):
        assert product_moment(a, m, b, n, k) == product_moment(b, n, a, m, k)


@pytest.mark.parametrize("m,n", [(2, 2), (2, 3), (3, 3), (2, 4)])
def test_product_of_spheres_matches_direct_sum(m, n):
    direct = psi_sequence(direct_sum(make_constant_curvature(m, 1), make_constant_curvature(n, 1)), 3)
    assert product_moments([1] * 4, m, [1] * 4, n, 3).values == direct.values


def test_product_with_random_factor_matches_direct_sum():
    a = random_tensor(3, 5)
    b = make_constant_curvature(2, Fraction(1, 2))
    combined = product_moments(psi_sequence(a, 3), 3, psi_sequence(b, 3), 2, 3)
    assert combined.values == psi_sequence(direct_sum(a, b), 3).values


def test_grassmannian_examples():
    assert gr2rn_moment(4, 1) == Fraction(2, 3)
    for n in range(4, 9):
        assert gr2rn_moment(n, 1) == Fraction(n - 2, 2 * n - 5)
    s2s2 = product_moments([1] * 5, 2, [1] * 5, 2, 4)
    for k in range(5):
        assert gr2rn_moment(4, k) == 2**k * s2s2[k]


def test_grassmannian_needs_n_at_least_four():
    with pytest.raises(ValueError):
        gr2rn_moment(3, 1)


def test_simplex_integrals():
    assert simplex_integral([0, 0, 0]) == Fraction(1, 2)
    assert simplex_integral([0, 0, 2]) == Fraction(1, 12)
    assert simplex_integral([1, 1]) == Fraction(1, 6)


def test_simplex_integral_against_quadrature():
    value, _ = integrate.dblquad(lambda y, x: x**2 * y**3 * (1 - x - y), 0, 1, 0, lambda x: 1 - x)
    assert value == pytest.approx(float(simplex_integral([2, 3, 1])), rel=1e-10)


def test_kernel_closed_form_surface_values():
    kern = ProductKernel(2, 2, 1.0, 0.0)
    for s in (0.04, 0.25, 0.5, 0.81):
        assert product_kernel_density(kern, s) == pytest.approx(s**-0.5 - 1, rel=1e-14)
    assert product_kernel_density(kern, 0.25) == pytest.approx(1.0)


@pytest.mark.parametrize("m,n,mu", [(2, 2, 1.0), (3, 1, 1.0), (4, 3, -2.0), (2, 5, 0.5), (5, 2, 3.0)])
def test_kernel_closed_form_normalised(m, n, mu):
    kern = ProductKernel(m, n, mu, 0.0)
    # integrate in x with s = mu x^2 so the s = 0 singularity disappears
    value, _ = integrate.quad(lambda t: product_kernel_density(kern, mu * t * t) * 2 * abs(mu) * t, 0, 1)
    assert abs(value - 1) < 1e-10


def test_kernel_swap_is_handled():
    a = ProductKernel(3, 2, 2.0, 0.0)
    b = ProductKernel(2, 3, 0.0, 2.0)
    for s in (0.3, 1.1, 1.9):
        assert product_kernel_density(a, s) == pytest.approx(product_kernel_density(b, s))


def test_kernel_support_and_errors():
    kern = ProductKernel(3, 3, 1.0, -2.0)
    assert kern.support == (-2.0, 1.0)
    with pytest.raises(ValueError):
        product_kernel_density(kern, 1.5)
    with pytest.raises(ValueError):
        ProductKernel(1, 1, 1.0, 0.0)
    with pytest.raises(ValueError):
        product_kernel_density(ProductKernel(1, 3, 1.0, 2.0), 0.5)


def test_general_kernel_histogram_is_normalised():
    kern = ProductKernel(3, 4, 1.0, -1.0, samples=200_000)
    s, w = kern.nodes()
    assert abs(float(np.sum(w)) - 1) < 1e-3


def test_general_kernel_moments_match_combinator():
    kern = ProductKernel(2, 2, 1.0, 1.0)
    s, w = kern.nodes()
    ones = [1] * 4
    for k in (1, 2, 3):
        exact = float(product_moment(ones, 2, ones, 2, k))
        est = mc_simplex(2, 2, 1.0, 1.0, k, 1_000_000, seed=0)
        assert est.within(exact)
        # binning perturbs moments by at most a few bin widths
        assert abs(float(np.sum(w * s**k)) - exact) < 2e-3


def test_kernel_moment_is_exact_for_rationals():
    assert kernel_moment(2, 2, 1, 1, 1) == Fraction(1, 3)
    assert kernel_moment(3, 1, 1, 0, 2) == Fraction(1, 3)
    assert isinstance(kernel_moment(2, 2, 1.0, 1.0, 1), float)


def test_product_density_of_two_surfaces():
    kern = product_density(Atom(1), 2, Atom(1), 2)
    assert isinstance(kern, ProductKernel)
    s, w = kern.nodes()
    assert float(np.sum(w * s)) == pytest.approx(1 / 3, abs=2e-3)


def test_product_density_circle_times_three_sphere():
    kern = product_density(Atom(1), 3, Atom(0), 1)
    s, w = kern.nodes(64)
    assert float(np.sum(w)) == pytest.approx(1.0, abs=1e-12)
    assert float(np.sum(w * s)) == pytest.approx(0.5, abs=1e-12)
    assert float(np.sum(w * s * s)) == pytest.approx(1 / 3, abs=1e-12)


def test_product_density_with_cp2_factor():
    dens = product_density(CrossDensity(0, 0), 4, Atom(1), 2)
    assert isinstance(dens, TabulatedDensity)
    assert dens.total_mass() == pytest.approx(1.0, abs=1e-12)
    exact = float(product_moment([cross_moment(0, 0, k) for k in range(3)], 4, [1, 1, 1], 2, 1))
    assert dens.moment(1) == pytest.approx(exact, abs=1e-2)


def test_product_density_rejects_unnormalised_factor():
    bad = TabulatedDensity(np.array([0.0, 1.0]), np.array([2.0]), "bad")
    with pytest.raises(ValueError):
        product_density(bad, 2, Atom(1), 2)
