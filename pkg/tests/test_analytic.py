"""Tests of the characteristic functions, generating functions and the
singularity extraction.

Frozen reference numbers were produced by independent means (dense
brute-force quadrature, exact path enumeration, closed forms) and are
asserted against here so regressions cannot hide behind self-agreement.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from owk import analytic


def test_first_return_pgf_closed_values():
    # g(1/2) = 2 - sqrt(3), g(1) = 1, g(2/3) = (3 - sqrt(5))/2
    assert analytic.first_return_pgf(0.5) == pytest.approx(2.0 - math.sqrt(3.0), abs=1e-14)
    assert analytic.first_return_pgf(1.0) == pytest.approx(1.0, abs=1e-12)
    assert analytic.first_return_pgf(2.0 / 3.0) == pytest.approx(
        (3.0 - math.sqrt(5.0)) / 2.0, abs=1e-14)
    assert analytic.first_return_pgf(0.0) == 0.0


def test_first_return_pgf_rejects_outside_disk():
    with pytest.raises(ValueError):
        analytic.first_return_pgf(1.5)


@given(st.floats(0.01, 0.99), st.floats(0.0, 2.0 * math.pi))
@settings(max_examples=200, deadline=None)
def test_first_return_branch_stays_in_disk(rad, ang):
    z = rad * complex(math.cos(ang), math.sin(ang))
    assert abs(analytic.first_return_pgf(z)) <= 1.0 + 1e-12


def test_quadratic_identity_on_grid():
    rad = np.linspace(1e-3, 0.999, 32)
    ang = np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False)
    z = (rad[:, None] * np.exp(1j * ang[None, :])).ravel()
    g = analytic.first_return_pgf(z)
    assert np.abs(g - 0.5 * z * (1.0 + g * g)).max() <= 1e-12


def test_embedded_cf_frozen_value_at_pi():
    # independent dense-quadrature/algebraic evaluation of Re[g(r)/r] at t = pi
    assert analytic.embedded_cf(np.pi, 1.0 / 3.0) == pytest.approx(
        0.5051025721682201, abs=1e-13)


def test_cf_forms_at_zero_and_evenness():
    t = np.linspace(-np.pi, np.pi, 513)
    for form in analytic.CF_FORMS:
        for p in (1.0 / 3.0, 2.0 / 3.0, 0.41):
            phi = analytic.cf_by_form(t, p, form)
            assert abs(analytic.cf_by_form(0.0, p, form) - 1.0) <= 1e-14
            assert np.abs(phi - phi[::-1]).max() <= 1e-14
            assert np.abs(phi).max() <= 1.0 + 1e-12


@given(st.floats(1e-8, math.pi), st.floats(0.05, 0.95),
       st.sampled_from(analytic.CF_FORMS))
@settings(max_examples=300, deadline=None)
def test_one_minus_cf_matches_direct_subtraction(t, p, form):
    stable = analytic.one_minus_embedded_cf(t, p, form)
    direct = 1.0 - analytic.cf_by_form(t, p, form)
    # the direct subtraction itself loses digits near t = 0 (that is why
    # the stable form exists), so the tolerance carries a relative part
    assert abs(stable - direct) <= 1e-12 + 1e-7 * abs(stable)
    assert stable > 0.0


def test_one_minus_cf_square_root_behavior():
    """1 - phi(t) ~ sqrt(q t / p) near 0 for both forms."""
    for form, p in (("ratio", 1.0 / 3.0), ("excursion", 2.0 / 3.0)):
        q = 1.0 - p
        t = 1e-12
        ratio = analytic.one_minus_embedded_cf(t, p, form) / math.sqrt(q * t / p)
        assert ratio == pytest.approx(1.0, rel=1e-5)


def test_fourier_coefficients_of_cf_are_nonnegative():
    """Both forms are characteristic functions of integer laws, so their
    Fourier coefficients must be (numerically) nonnegative."""
    n = 4096
    t = 2.0 * np.pi * np.arange(n) / n
    for form, p in (("ratio", 1.0 / 3.0), ("excursion", 2.0 / 3.0)):
        coeffs = np.real(np.fft.fft(analytic.cf_by_form(t, p, form))) / n
        assert coeffs.min() >= -1e-8
        assert abs(coeffs.sum() - 1.0) <= 1e-10


def test_excursion_cf_mass_at_zero_matches_path_enumeration():
    """Exact enumeration of zero-displacement excursions gives
    P(X = 0) = g(2/3) = (3 - sqrt 5)/2 for the excursion form at p = 2/3."""
    n = 1 << 18
    t = 2.0 * np.pi * np.arange(n) / n
    coeffs = np.real(np.fft.fft(analytic.excursion_cf(t, 2.0 / 3.0))) / n
    # the heavy k^{-3/2} tail aliases ~n^{-3/2} mass back into bin 0
    assert coeffs[0] == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0, abs=2e-8)


def test_closed_form_matches_probabilistic_form():
    report = analytic.closed_form_report(p=1.0 / 3.0, n_points=1000)
    assert report["agrees_within_1e-9"]
    assert report["max_abs_diff_corrected"] <= 1e-11
    # the uncorrected variant only coincides at p = 1
    assert report["max_abs_diff_as_expanded"] > 1.0


def test_closed_form_rejects_t_zero():
    with pytest.raises(ValueError):
        analytic.embedded_cf_closed(0.0)


def test_level_cf_is_power_of_g():
    t = np.linspace(0.1, 3.0, 7)
    g = analytic.first_return_pgf(analytic.geom_cf(t, 1.0 / 3.0))
    assert np.abs(analytic.level_cf(t, 3) - g ** 3).max() <= 1e-15
    assert np.all(analytic.level_cf(t, 0) == 1.0)
    # sign of y2 does not matter: only the distance to the axis does
    assert np.abs(analytic.level_cf(t, -3) - analytic.level_cf(t, 3)).max() == 0.0


def test_death_chain_pgf_values_and_power_law():
    assert analytic.death_chain_pgf(0.5, 1) == pytest.approx(0.25, abs=1e-16)
    assert analytic.death_chain_pgf(0.5, 2) == pytest.approx(0.0625, abs=1e-16)
    assert analytic.death_chain_pgf(0.5, 3) == pytest.approx(0.015625, abs=1e-16)
    xs = np.linspace(0.0, 1.49, 100)
    base = analytic.death_chain_pgf(xs, 1)
    for h in (2, 4):
        assert np.abs(analytic.death_chain_pgf(xs, h) - base ** h).max() <= 1e-14
    with pytest.raises(ValueError):
        analytic.death_chain_pgf(1.5, 1)
    with pytest.raises(ValueError):
        analytic.death_chain_pgf(0.5, -1)


def test_extract_singularity_constants():
    est = analytic.extract_singularity(1.0 / 3.0, "ratio")
    # c = sqrt(p/q) = sqrt(1/2); c' = c sqrt(pi/2) = sqrt(pi)/2
    assert est.c == pytest.approx(math.sqrt(0.5), abs=1e-9)
    assert est.c_prime == pytest.approx(math.sqrt(math.pi) / 2.0, abs=1e-9)
    assert 0.4 <= est.diagnostics["residual_slope"] <= 0.6


def test_extract_singularity_excursion_form():
    est = analytic.extract_singularity(2.0 / 3.0, "excursion")
    assert est.c == pytest.approx(math.sqrt(2.0), abs=1e-8)
