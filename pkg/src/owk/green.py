"""Singularity-aware oscillatory quadrature for the walk's Fourier integrals.

All integrals here share the structure

    I(m, n) = int_{-pi}^{pi} e^{itm} g(r(t))^n / (1 - phi(t)) dt

with an integrable 1/sqrt|t| endpoint singularity at t = 0.  The
integrand at -t is the complex conjugate of the integrand at t, so the
integral is real and folds to 2 int_0^pi Re[...] dt.  The singular range
[0, split] is computed under the substitution t = u^2, which turns the
integrand into a bounded analytic function of u; the regular range uses
Gauss-Legendre panels whose width tracks the e^{itm} oscillation.

Phase convention: green_halfplane(z, y) for y2 > 0 evaluates I(z - y1, |y2|),
i.e. the phase is e^{it(z - y1)}.  With this choice the integral is, up
to the constant 3/(4 pi), the expected number of visits to y for the
walk started at the axis point z, and the merged-power identity behind
averaged_axis_kernel holds exactly (see owk.martin).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import (NumericError, first_return_pgf, geom_cf,
                       one_minus_embedded_cf)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class QuadratureSpec:
    """Parameters of the split singular/regular quadrature.

    split separates the singular range (where t = u^2 is applied) from
    the oscillatory regular range; node counts are lower bounds that the
    panel builder scales up with the oscillation frequency.
    """

    split: float = 0.25
    substitution: str = "t=u^2"
    nodes_singular: int = 128
    nodes_regular: int = 64
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.split < np.pi):
            raise ValueError("split must lie in (0, pi)")
        if self.nodes_singular < 16 or self.nodes_regular < 16:
            raise ValueError("node counts must be >= 16")
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return replace(self, nodes_singular=self.nodes_singular * factor,
                       nodes_regular=self.nodes_regular * factor)


DEFAULT_SPEC = QuadratureSpec()


def _panels(a: float, b: float, n_panels: int):
    """Flattened 16-point Gauss-Legendre nodes/weights on n_panels equal
    subdivisions of [a, b]."""
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _integrand_core(t, m, n_plus, n_minus, p, form):
    """Re[e^{itm} g^{n_plus} conj(g)^{n_minus}] / (1 - phi(t)) on t > 0."""
    one_minus_phi = one_minus_embedded_cf(t, p, form=form)
    num = np.exp(1j * m * t)
    if n_plus or n_minus:
        g = first_return_pgf(geom_cf(t, p))
        if n_plus:
            num = num * g ** n_plus
        if n_minus:
            num = num * np.conj(g) ** n_minus
    return np.real(num) / one_minus_phi


def halfplane_integral(m: int, n_plus: int, n_minus: int = 0,
                       p: float = 1.0 / 3.0, spec: QuadratureSpec = DEFAULT_SPEC,
                       form: str = "ratio") -> float:
    """The folded integral 2 int_0^pi Re[e^{itm} g^{n+} conj(g)^{n-}]/(1-phi) dt,
    equal to int_{-pi}^{pi} e^{itm} g^{n+} conj(g)^{n-} / (1 - phi) dt."""
    if n_plus < 0 or n_minus < 0:
        raise ValueError("power arguments must be >= 0")
    m = int(m)
    n_tot = n_plus + n_minus
    q = 1.0 - p
    am = abs(m)

    # singular range, t = u^2 on [0, sqrt(split)]
    us = np.sqrt(spec.split)
    base_s = max(1, spec.nodes_singular // 16)
    osc_s = int(np.ceil(am * spec.split / np.pi)) + 1
    decay_s = int(np.ceil(us * n_tot * np.sqrt(q / p) / 4.0)) + 1
    nodes_u, weights_u = _panels(0.0, us, max(base_s, osc_s, decay_s))
    fu = _integrand_core(nodes_u ** 2, m, n_plus, n_minus, p, form)
    total = float(np.dot(weights_u, 2.0 * nodes_u * fu))

    # regular range [split, pi]
    skip = False
    if n_tot > 0:
        g_split = abs(first_return_pgf(geom_cf(spec.split, p)))
        bound = (g_split ** n_tot) * (np.pi - spec.split) \
            / one_minus_embedded_cf(spec.split, p, form=form)
        skip = bound < 1e-3 * spec.abs_tol
    if not skip:
        base_r = max(1, spec.nodes_regular // 16)
        osc_r = int(np.ceil((np.pi - spec.split) * max(am, 1) / (2.0 * np.pi))) + 1
        nodes_t, weights_t = _panels(spec.split, np.pi, max(base_r, osc_r))
        ft = _integrand_core(nodes_t, m, n_plus, n_minus, p, form)
        total += float(np.dot(weights_t, ft))
    return 2.0 * total


def halfplane_integral_batch(ms, n_plus: int, n_minus: int = 0,
                             p: float = 1.0 / 3.0,
                             spec: QuadratureSpec = DEFAULT_SPEC,
                             form: str = "ratio") -> np.ndarray:
    """halfplane_integral for an array of phases m on one shared node set
    (sized for max |m|, so every entry is at least as well resolved as a
    scalar call would be)."""
    ms = np.asarray(ms, dtype=np.int64)
    if ms.size == 0:
        return np.zeros(0)
    n_tot = n_plus + n_minus
    q = 1.0 - p
    am = int(np.abs(ms).max())

    us = np.sqrt(spec.split)
    base_s = max(1, spec.nodes_singular // 16)
    osc_s = int(np.ceil(am * spec.split / np.pi)) + 1
    decay_s = int(np.ceil(us * n_tot * np.sqrt(q / p) / 4.0)) + 1
    nodes_u, weights_u = _panels(0.0, us, max(base_s, osc_s, decay_s))
    base_r = max(1, spec.nodes_regular // 16)
    osc_r = int(np.ceil((np.pi - spec.split) * max(am, 1) / (2.0 * np.pi))) + 1
    nodes_t, weights_t = _panels(spec.split, np.pi, max(base_r, osc_r))

    t_all = np.concatenate([nodes_u ** 2, nodes_t])
    w_all = np.concatenate([weights_u * 2.0 * nodes_u, weights_t])
    core = 1.0 / one_minus_embedded_cf(t_all, p, form=form) + 0.0j
    if n_tot:
        g = first_return_pgf(geom_cf(t_all, p))
        if n_plus:
            core = core * g ** n_plus
        if n_minus:
            core = core * np.conj(g) ** n_minus
    weighted = w_all * core
    phases = np.exp(1j * np.outer(ms, t_all))
    return 2.0 * np.real(phases @ weighted)


def gamma(x: int, p: float = 1.0 / 3.0, spec: QuadratureSpec = DEFAULT_SPEC,
          form: str = "ratio", check: bool = False) -> float:
    """gamma(x) = int_0^pi cos(xt) / (1 - phi(t)) dt.

    With check=True the value is recomputed on doubled node counts and a
    NumericError carrying the partial value is raised if the two differ
    by more than max(abs_tol, rel_tol * |value|).
    """
    val = 0.5 * halfplane_integral(x, 0, 0, p, spec, form)
    if check:
        ref = 0.5 * halfplane_integral(x, 0, 0, p, spec.refined(), form)
        if abs(val - ref) > max(spec.abs_tol, spec.rel_tol * abs(ref)):
            raise NumericError(f"gamma({x}) quadrature error estimate "
                               f"{abs(val - ref):.3e} exceeds tolerance; "
                               f"partial value {val!r}")
    return val


def green_embedded(x: int, y: int, p: float = 1.0 / 3.0,
                   spec: QuadratureSpec = DEFAULT_SPEC, form: str = "ratio") -> float:
    """Green function of the axis chain, G0(x, y) = gamma(y - x) / pi."""
    return gamma(int(y) - int(x), p, spec, form) / np.pi


def green_halfplane(z: int, y, p: float = 1.0 / 3.0,
                    spec: QuadratureSpec = DEFAULT_SPEC, form: str = "ratio") -> float:
    """The raw half-plane integral I(z - y1, |y2|) (phase e^{it(z - y1)}).

    z is a point of the axis Z x {0}.  For y2 < 0 the lattice symmetry
    (a, b) -> (-a, -b) maps the model to itself, so the value is the
    mirrored integral I(y1 - z, |y2|).  The folded evaluation enforces
    the conjugate symmetry of the integrand, hence a real result, by
    construction; the imaginary part of the two-sided integral is
    identically zero.

    Up to the factor 3/(4 pi) (for y2 != 0) this is the expected number
    of visits to y for the full walk started at (z, 0).
    """
    y1, y2 = _point(y)
    if y2 >= 0:
        return halfplane_integral(int(z) - y1, abs(y2), 0, p, spec, form)
    return halfplane_integral(y1 - int(z), abs(y2), 0, p, spec, form)


def _point(y):
    if hasattr(y, "v1"):
        return int(y.v1), int(y.v2)
    y1, y2 = y
    return int(y1), int(y2)


@dataclass
class GreenTable:
    """Green values keyed by (x, y) with the normalization convention
    recorded: normalization "embedded" means the 1/pi factor is applied,
    "raw-gamma" stores gamma itself."""

    entries: dict = field(default_factory=dict)
    normalization: str = "embedded"


@dataclass
class ProbabilityTable:
    """Finitely supported measure on Z with the truncated mass recorded."""

    support: np.ndarray
    masses: np.ndarray
    tail_bound: float = 0.0

    def total(self) -> float:
        return float(self.masses.sum()) + self.tail_bound

    def as_dict(self) -> dict:
        return {int(v): float(m) for v, m in zip(self.support, self.masses)}


def hitting_distribution(y, p: float = 2.0 / 3.0, spec: QuadratureSpec = DEFAULT_SPEC,
                         tail_tol: float = 1e-3, max_log2_support: int = 20,
                         strict: bool = True) -> ProbabilityTable:
    """Law nu_y of the horizontal position at the first visit to the axis,
    started from y = (y1, y2), by FFT inversion of e^{ity1} g(r(t))^{|y2|}.

    From height y2 > 0 every horizontal push is +1, so the law is
    supported on {y1, y1+1, ...}; from y2 < 0 it is the mirror image
    v -> 2 y1 - v.  The grid is grown in powers of two until the mass
    outside the kept window is below tail_tol; the heavy k^{-3/2} tail
    makes very small tail_tol unreachable within the 2^max_log2_support
    support cap, which is reported as a numeric error.
    """
    if tail_tol <= 0.0:
        raise ValueError("tail_tol must be positive")
    y1, y2 = _point(y)
    k = abs(y2)
    if k == 0:
        return ProbabilityTable(support=np.array([y1]), masses=np.array([1.0]),
                                tail_bound=0.0)
    n_grid = 1024
    while True:
        t = 2.0 * np.pi * np.arange(n_grid) / n_grid
        vals = first_return_pgf(geom_cf(t, p)) ** k
        # coefficients of sum_v m_v e^{itv} on v >= 0: forward transform / N
        masses = np.real(np.fft.fft(vals)) / n_grid
        csum = np.cumsum(masses)
        half = n_grid // 2
        tail_at_half = 1.0 - csum[half - 1]
        if tail_at_half <= tail_tol:
            width = int(np.searchsorted(csum, 1.0 - tail_tol)) + 1
            width = min(width, half)
            kept = masses[:width]
            break
        if n_grid >= 2 ** max_log2_support:
            if not strict:
                width = n_grid // 2
                kept = masses[:width]
                break
            raise NumericError(
                f"hitting_distribution support exceeded 2^{max_log2_support} "
                f"before reaching tail_tol={tail_tol:g} (tail {tail_at_half:.3e})")
        n_grid *= 2
    if kept.min() < -1e-8:
        raise NumericError(f"inversion produced mass {kept.min():.3e} < -1e-8")
    kept = np.where((kept < 0.0) & (kept > -1e-10), 0.0, kept)
    tail = 1.0 - float(kept.sum())
    if y2 >= 0:
        support = y1 + np.arange(width)
    else:
        support = y1 - np.arange(width)
    return ProbabilityTable(support=support, masses=kept, tail_bound=tail)


def mu_x(u: int, x, y1: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Defective height law mu_x(u) at the first time the horizontal
    record reaches y1, on the event that the excursion endpoint lies at
    or beyond y1.

    Derivation of the real reduction implemented here: with m = y1 - x1
    and F(s) = s / (3 - 2s),

      mu_x(u) = (1/2pi) int_{-pi}^{pi} F(cos t)^m 2i sin(t x2) e^{-itu} dt.

    Splitting e^{-itu} = cos(tu) - i sin(tu), the even*odd product
    F^m sin(t x2) cos(tu) integrates to zero over the symmetric range,
    leaving

      mu_x(u) = (2/pi) int_0^pi F(cos t)^m sin(t x2) sin(t u) dt.

    This reduction is cross-checked against direct complex quadrature in
    the test suite.
    """
    x1, x2 = _point(x)
    if y1 <= x1:
        raise ValueError("mu_x requires y1 > x1")
    if x2 < 0 or u < 0:
        raise ValueError("mu_x requires x2 >= 0 and u >= 0")
    if x2 == 0 or u == 0:
        return 0.0
    m = y1 - x1
    base = max(1, spec.nodes_regular // 16)
    n_panels = max(base, int(u), int(x2), int(np.ceil(3.0 * np.sqrt(m))))
    nodes, weights = _panels(0.0, np.pi, n_panels)
    f = np.cos(nodes) / (3.0 - 2.0 * np.cos(nodes))
    integrand = f ** m * np.sin(nodes * x2) * np.sin(nodes * u)
    return float(2.0 / np.pi * np.dot(weights, integrand))


def mu_x_total(x, y1: int, u_max: int = 400,
               spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """sum_{u=0}^{u_max} mu_x(u); approximates P^x(endpoint record event)."""
    return float(sum(mu_x(u, x, y1, spec) for u in range(u_max + 1)))
