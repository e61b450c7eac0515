import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvmo.curvature import (
    InvalidTensorError,
    JacobiSpectrumModel,
    CurvatureTensor,
    make_constant_curvature,
    make_cpn,
    make_hpn,
    make_op2_spectrum,
    make_zero,
    random_tensor,
    scalar_curvature,
)
from curvmo.moments import (
    DegreeBudgetError,
    MomentSequence,
    degree_budget,
    det_generating_check,
    gaussian_integrate,
    power_mean_roots,
    psi,
    psi_from_spectrum,
    psi_sequence,
    spectrum_moments,
    sphere_integrate,
    sup_sec_estimate,
    volumes,
)
from curvmo.poly import Polynomial, falling_factorial, gen_binomial, norm_squared
from conftest import polynomials


def x(i, dim):
    return Polynomial.variable(dim, i)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_sphere_moments_are_one(m):
    assert psi_sequence(make_constant_curvature(m, 1), 5).values == (1,) * 6


def test_cp2_first_two_moments():
    r = make_cpn(2, 24)
    assert psi(r, 1) == 2
    assert psi(r, 2) == Fraction(24, 5)


@pytest.mark.parametrize("m,seed", [(2, 0), (3, 1), (4, 2), (5, 3)])
def test_mean_is_normalised_scalar_curvature(m, seed):
    r = random_tensor(m, seed)
    assert psi(r, 1) == scalar_curvature(r) / (m * (m - 1))


def test_psi_rejects_invalid_tensor():
    comps = make_zero(3).components.copy()
    comps[0, 1, 0, 1] = Fraction(1)
    with pytest.raises(InvalidTensorError):
        psi(CurvatureTensor(comps), 1)


def test_psi_rejects_dimension_one():
    with pytest.raises(ValueError):
        psi(make_zero(1), 1)


def test_degree_budget_enforced():
    with pytest.raises(DegreeBudgetError):
        psi(make_constant_curvature(3, 1), degree_budget() + 1)


def test_degree_budget_env_override(monkeypatch):
    monkeypatch.setenv("CURVMO_DEGREE_BUDGET", "7")
    assert degree_budget() == 7
    assert psi(make_constant_curvature(2, 1), 7) == 1
    monkeypatch.setenv("CURVMO_DEGREE_BUDGET", "seven")
    with pytest.raises(ValueError):
        degree_budget()


def test_op2_mean_by_hand_sum():
    # sum_r 4^r C(-7/2, r) C(-4, 1-r) / C(-15/2, 1)
    hand = (gen_binomial(-4, 1) + 4 * gen_binomial(Fraction(-7, 2), 1)) / gen_binomial(Fraction(-15, 2), 1)
    assert hand == Fraction(12, 5)
    assert psi_from_spectrum(make_op2_spectrum(), 1) == hand


def test_cp2_spectrum_second_moment():
    model = JacobiSpectrumModel(((0, 1), (4, 1), (1, 2)))
    assert psi_from_spectrum(model, 2) == Fraction(24, 5) == psi(make_cpn(2, 24), 2)


@pytest.mark.parametrize("m", [2, 5, 9, 16])
def test_sphere_spectrum_moments(m):
    model = JacobiSpectrumModel(((0, 1), (1, m - 1)))
    assert spectrum_moments(model, 8).values == (1,) * 9


@pytest.mark.parametrize(
    "tensor,model",
    [
        (make_cpn(2), ((0, 1), (4, 1), (1, 2))),
        (make_cpn(3), ((0, 1), (4, 1), (1, 4))),
        (make_hpn(2), ((0, 1), (4, 3), (1, 4))),
        (make_constant_curvature(4, Fraction(3, 2)), ((0, 1), (Fraction(3, 2), 3))),
    ],
    ids=["cp2", "cp3", "hp2", "s4"],
)
def test_tensor_path_equals_spectrum_path(tensor, model):
    assert psi_sequence(tensor, 4).values == spectrum_moments(JacobiSpectrumModel(model), 4).values


def test_gaussian_moments():
    assert gaussian_integrate(x(0, 2) ** 2) == 1
    assert gaussian_integrate(x(0, 2) ** 4) == 3
    assert gaussian_integrate(x(0, 3) ** 3 + x(1, 3) * x(2, 3) ** 2) == 0


def test_gaussian_of_constant_and_mixed():
    p = Polynomial.constant(2, 5) + x(0, 2) ** 2 * x(1, 2) ** 2
    assert gaussian_integrate(p) == 6


def test_sphere_integrals():
    for m in (2, 3, 6):
        for k in range(4):
            assert sphere_integrate(norm_squared(m) ** k) == 1
    assert sphere_integrate(x(0, 3) ** 2) == Fraction(1, 3)
    assert sphere_integrate(x(0, 4)) == 0


def test_sphere_integrate_needs_homogeneous():
    with pytest.raises(ValueError):
        sphere_integrate(x(0, 3) ** 2 + x(1, 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(2, 4), st.data())
def test_gaussian_sphere_conversion(half, m, data):
    p = data.draw(polynomials(dim=m, homogeneous_degree=2 * half))
    factor = 2**half * falling_factorial(Fraction(m, 2) + half - 1, half)
    assert gaussian_integrate(p) == factor * sphere_integrate(p)


def test_det_check_zero_matrix():
    assert det_generating_check(np.zeros((3, 3)), 0.7) == (1.0, 1.0)


@pytest.mark.parametrize("m", [1, 3, 6])
def test_det_check_scaled_identity(m):
    series, closed = det_generating_check(np.eye(m) / 4, 0.5)
    assert series == pytest.approx((3 / 4) ** (-m / 2), rel=1e-13)
    assert closed == pytest.approx((3 / 4) ** (-m / 2), rel=1e-13)


@pytest.mark.parametrize("seed", range(10))
def test_det_check_random_symmetric(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((5, 5))
    f = a + a.T
    f *= 0.3 / np.max(np.abs(np.linalg.eigvalsh(f)))
    series, closed = det_generating_check(f, 0.5)
    assert abs(series - closed) < 1e-12


def test_det_check_rejects_divergent_series():
    with pytest.raises(ValueError):
        det_generating_check(np.eye(2), 0.5)
    with pytest.raises(ValueError):
        det_generating_check(np.array([[0.0, 0.1], [0.0, 0.0]]), 0.5)


def test_sup_estimate_sphere():
    assert sup_sec_estimate(psi_sequence(make_constant_curvature(4, 1), 4)) == 1.0


def test_sup_estimate_cp2_high_order():
    seq = spectrum_moments(JacobiSpectrumModel(((0, 1), (4, 1), (1, 2))), 12)
    roots = power_mean_roots(seq)
    assert all(a <= b for a, b in zip(roots, roots[1:]))
    assert 2.8 < sup_sec_estimate(seq) <= 4


def test_sup_estimate_zero_tensor():
    assert sup_sec_estimate(psi_sequence(make_zero(3), 2)) == 0.0


def test_sup_estimate_needs_second_moment():
    with pytest.raises(ValueError):
        sup_sec_estimate(MomentSequence((1, 2), 4))


def test_volumes():
    s2, st2, gr2 = volumes(2)
    assert gr2 == pytest.approx(1.0)
    assert volumes(3)[0] == pytest.approx(4 * math.pi)
    assert volumes(4)[1] == pytest.approx(8 * math.pi**3)
    for m in range(2, 9):
        stiefel, grass = volumes(m)[1:]
        assert stiefel == pytest.approx(2**m * math.pi ** (m - 1) / math.factorial(m - 2))
        assert grass == pytest.approx((2 * math.pi) ** (m - 2) / math.factorial(m - 2))
    with pytest.raises(ValueError):
        volumes(1)


def test_moment_sequence_starts_at_one():
    with pytest.raises(ValueError):
        MomentSequence((2, 1), 3)
    seq = MomentSequence((1, Fraction(1, 2)), 3)
    assert seq.order == 1
    assert seq.as_strings() == ["1", "1/2"]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(-4, 4), st.integers(1, 3))
def test_psi_is_homogeneous(seed, num, den):
    c = Fraction(num, den)
    r = random_tensor(3, seed)
    base = psi_sequence(r, 3).values
    scaled = psi_sequence(r * c, 3).values
    assert scaled == tuple(c**k * v for k, v in enumerate(base))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_surface_moments_are_powers(seed):
    r = random_tensor(2, seed)
    seq = psi_sequence(r, 5).values
    assert seq == tuple(seq[1] ** k for k in range(6))


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_even_moment_roots_grow(m, seed):
    seq = psi_sequence(random_tensor(m, seed), 4)
    roots = power_mean_roots(seq)
    assert seq[2] - seq[1] ** 2 >= 0
    assert roots[0] <= roots[1] + 1e-12
