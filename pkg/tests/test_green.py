"""Tests of the quadrature layer: gamma, the half-plane integrals, the
hitting-law inversion and the defective height law."""

from __future__ import annotations

import math

import numpy as np
import pytest

from owk import green
from owk.analytic import NumericError, first_return_pgf, geom_cf, \
    one_minus_embedded_cf
from owk.green import QuadratureSpec


# frozen by an independent dense brute-force quadrature (500k-point
# trapezoid on [delta, pi] plus the analytic sqrt-head on [0, delta])
GAMMA0 = 6.662050933070673
GAMMA1 = 0.32402390376212503


def brute_gamma(x: int, p: float = 1.0 / 3.0, n: int = 400000) -> float:
    """Straight trapezoid evaluation with an analytic treatment of the
    1/sqrt(t) head; slow but entirely independent of the panel code."""
    delta = 1e-6
    # geometric spacing resolves the 1/sqrt(t) spike near the origin
    t = np.geomspace(delta, np.pi, n)
    f = np.cos(x * t) / one_minus_embedded_cf(t, p, form="ratio")
    tail = float(np.trapezoid(f, t))
    # on [0, delta]: 1/(1 - phi) = sqrt(p/(q t)) (1 + O(sqrt t)), cos(xt) ~ 1
    q = 1.0 - p
    head = 2.0 * math.sqrt(p * delta / q)
    return tail + head


def test_gamma_frozen_values():
    assert green.gamma(0) == pytest.approx(GAMMA0, abs=1e-9)
    assert green.gamma(1) == pytest.approx(GAMMA1, abs=1e-9)


def test_gamma_against_brute_force():
    for x in (0, 1, 7, 40):
        assert green.gamma(x) == pytest.approx(brute_gamma(x), abs=5e-5)


def test_gamma_evenness():
    for x in (1, 3, 17, 200):
        assert green.gamma(x) == pytest.approx(green.gamma(-x), abs=1e-12)


def test_gamma_node_doubling_stability():
    spec = QuadratureSpec()
    for x in (0, 5, 123, 4096):
        a = green.gamma(x, spec=spec)
        b = green.gamma(x, spec=spec.refined())
        assert abs(a - b) <= 10.0 * spec.abs_tol


def test_gamma_check_flag_passes_on_default_spec():
    assert green.gamma(50, check=True) == pytest.approx(green.gamma(50), abs=1e-12)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(split=4.0)
    with pytest.raises(ValueError):
        QuadratureSpec(nodes_singular=8)
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)


def test_halfplane_integral_batch_matches_scalar():
    ms = np.array([-40, -3, 0, 1, 17])
    batch = green.halfplane_integral_batch(ms, 2)
    for m, val in zip(ms, batch):
        assert val == pytest.approx(green.halfplane_integral(int(m), 2), abs=1e-9)


def test_green_halfplane_mirror_symmetry():
    """(a, b) -> (-a, -b) invariance: G(z, y) = G(-z, -y)."""
    for z, y in [(0, (3, 2)), (2, (5, 1)), (-1, (4, 6))]:
        direct = green.green_halfplane(z, y)
        mirrored = green.green_halfplane(-z, (-y[0], -y[1]))
        assert direct == pytest.approx(mirrored, abs=1e-10)


def test_green_embedded_is_gamma_over_pi():
    assert green.green_embedded(2, 7) == pytest.approx(green.gamma(5) / np.pi,
                                                       abs=1e-14)


def test_hitting_distribution_point_mass_on_axis():
    table = green.hitting_distribution((4, 0))
    assert table.support.tolist() == [4]
    assert table.masses.tolist() == [1.0]
    assert table.tail_bound == 0.0


def test_hitting_distribution_head_and_translation():
    base = green.hitting_distribution((0, 1), p=2.0 / 3.0, tail_tol=1e-3)
    # mass at the start column is g evaluated at r(0) = 1... the zero-push
    # probability (3 - sqrt 5)/2
    # tolerance covers the k^{-3/2} aliasing of the inversion grid
    assert base.masses[0] == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0, abs=1e-7)
    assert abs(base.total() - 1.0) <= 1e-12
    shifted = green.hitting_distribution((9, 1), p=2.0 / 3.0, tail_tol=1e-3)
    assert np.allclose(shifted.masses, base.masses, atol=1e-13)
    assert shifted.support[0] == 9


def test_hitting_distribution_mirror_for_negative_height():
    up = green.hitting_distribution((3, 2), tail_tol=1e-2)
    down = green.hitting_distribution((3, -2), tail_tol=1e-2)
    assert np.allclose(up.masses, down.masses, atol=1e-13)
    assert down.support[0] == 3 and down.support[1] == 2


def test_hitting_distribution_strict_failure_and_best_effort():
    with pytest.raises(NumericError):
        green.hitting_distribution((0, 1), tail_tol=1e-9, max_log2_support=14)
    table = green.hitting_distribution((0, 1), tail_tol=1e-9,
                                       max_log2_support=14, strict=False)
    assert table.tail_bound > 1e-9
    assert abs(table.total() - 1.0) <= 1e-12


def test_hitting_distribution_masses_match_direct_series():
    """The first few masses agree with the direct power-series expansion
    of g(r(t)) via a very large FFT grid."""
    n = 1 << 18
    t = 2.0 * np.pi * np.arange(n) / n
    coeffs = np.real(np.fft.fft(first_return_pgf(geom_cf(t, 2.0 / 3.0)))) / n
    table = green.hitting_distribution((0, 1), p=2.0 / 3.0, tail_tol=1e-3)
    assert np.allclose(table.masses[:8], coeffs[:8], atol=1e-10)


def test_mu_reduction_matches_complex_quadrature():
    """The real sine-product reduction equals the raw complex Fourier
    integral (1/2pi) int F^m 2i sin(t x2) e^{-itu} dt."""
    t = np.linspace(-np.pi, np.pi, 200001)
    f = np.cos(t) / (3.0 - 2.0 * np.cos(t))
    for (x1, x2, y1, u) in [(0, 1, 3, 1), (0, 2, 5, 1), (0, 2, 5, 3),
                            (1, 3, 6, 2), (-2, 2, 4, 4), (0, 4, 9, 2),
                            (0, 1, 2, 2), (3, 2, 11, 1), (0, 3, 4, 5),
                            (0, 2, 12, 2)]:
        m = y1 - x1
        integrand = f ** m * 2j * np.sin(t * x2) * np.exp(-1j * t * u)
        direct = float(np.real(np.trapz(integrand, t)) / (2.0 * np.pi))
        assert green.mu_x(u, (x1, x2), y1) == pytest.approx(direct, abs=1e-8)


def test_mu_boundary_cases_and_validation():
    assert green.mu_x(0, (0, 2), 5) == 0.0
    assert green.mu_x(3, (0, 0), 5) == 0.0
    with pytest.raises(ValueError):
        green.mu_x(1, (5, 2), 3)
    with pytest.raises(ValueError):
        green.mu_x(-1, (0, 2), 5)


def test_mu_total_is_a_subprobability():
    total = green.mu_x_total((0, 2), 5)
    assert 0.0 < total <= 1.0 + 1e-8
    # frozen from an independent summation run
    assert total == pytest.approx(0.4018, abs=5e-3)
