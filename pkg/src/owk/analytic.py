"""Special functions of the one-way half-plane walk.

Conventions used throughout:

  r(t)   = p / (1 - q e^{it}),  q = 1 - p   (geometric characteristic function)
  g(z)   = (1 - sqrt(1 - z^2)) / z          (first-return pgf root of
                                             g = (z/2)(1 + g^2) with |g| <= 1)
  phi(t) = Re[ g(r(t)) / r(t) ]             ("ratio" form)
  phi(t) = Re[ g(r(t)) ]                    ("excursion" form)

Both phi forms are valid symmetric characteristic functions with the
same square-root singularity of 1/(1 - phi) at t = 0; which one equals
the empirical characteristic function of the excursion displacement on
the lattice is decided by Monte Carlo arbitration (see owk.verify).
The closed-form evaluation embedded_cf_closed reproduces the ratio form
through an explicit modulus/arctan expansion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CF_FORMS = ("ratio", "excursion")


class NumericError(ArithmeticError):
    """A numerical contract was violated (branch selection, convergence)."""


def _as_array(t):
    a = np.asarray(t, dtype=float)
    return a, (a.ndim == 0)


def geom_cf(t, p: float):
    """Characteristic function r(t) = p / (1 - q e^{it}) of the geometric
    law P(k) = p q^k on k = 0, 1, 2, ..."""
    _check_p(p)
    t, scalar = _as_array(t)
    q = 1.0 - p
    r = p / (1.0 - q * np.exp(1j * t))
    return complex(r) if scalar else r


def _check_p(p: float):
    if not (0.0 < p < 1.0):
        raise ValueError(f"p = {p} outside (0, 1)")


def _one_minus_eit(t):
    """1 - e^{it} evaluated without cancellation near t = 0."""
    half = 0.5 * t
    s = np.sin(half)
    return 2.0 * s * s - 2j * s * np.cos(half)


def _one_minus_r(t, p: float):
    """1 - r(t) = q (1 - e^{it}) / (1 - q e^{it}), stable near t = 0."""
    q = 1.0 - p
    ome = _one_minus_eit(t)
    return q * ome / (p + q * ome)


def _sqrt_one_minus_r2(t, p: float):
    """Principal sqrt(1 - r(t)^2) = sqrt((1 - r)(1 + r)).

    The principal branch has Re >= 0, which is exactly the branch making
    g(r) = (1 - w)/r the root of modulus <= 1 (the two roots multiply
    to 1, and |1 - w| <= |1 + w| iff Re w >= 0).
    """
    r = geom_cf(t, p)
    omr = _one_minus_r(t, p)
    return np.sqrt(omr * (1.0 + r)), r


def first_return_pgf(z):
    """First-return generating function g(z) = (1 - sqrt(1 - z^2)) / z.

    Of the two roots of g = (z/2)(1 + g^2) the one with modulus <= 1 is
    returned (the roots multiply to 1, so the smaller one always
    qualifies); g(0) = 0 by continuity.
    """
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.any(np.abs(z_arr) > 1.0 + 1e-12):
        raise ValueError("first_return_pgf requires |z| <= 1")
    w = np.sqrt((1.0 - z_arr) * (1.0 + z_arr))
    with np.errstate(invalid="ignore", divide="ignore"):
        g1 = (1.0 - w) / z_arr
        g2 = (1.0 + w) / z_arr
    g = np.where(np.abs(g1) <= np.abs(g2), g1, g2)
    g = np.where(z_arr == 0.0, 0.0 + 0.0j, g)
    if np.any(np.abs(g) > 1.0 + 1e-10):
        raise NumericError("branch selection failed: both roots of the "
                           "first-return quadratic exceed modulus 1 + 1e-10")
    return complex(g[0]) if scalar else g


def embedded_cf(t, p: float = 1.0 / 3.0):
    """Ratio-form characteristic function phi(t) = Re[g(r(t)) / r(t)]."""
    _check_p(p)
    t, scalar = _as_array(t)
    r = geom_cf(t, p)
    val = np.real(first_return_pgf(r) / r)
    return float(val) if scalar else val


def excursion_cf(t, p: float = 2.0 / 3.0):
    """Excursion-form characteristic function phi(t) = Re[g(r(t))].

    This is the characteristic function of sum_{j=1}^{T} xi_j with T the
    number of geometric slots in one vertical excursion counted from
    height 1 (pgf g), each slot contributing a geometric(p) horizontal
    push.
    """
    _check_p(p)
    t, scalar = _as_array(t)
    r = geom_cf(t, p)
    val = np.real(first_return_pgf(r))
    return float(val) if scalar else val


def one_minus_embedded_cf(t, p: float = 1.0 / 3.0, form: str = "ratio"):
    """1 - phi(t), evaluated without the catastrophic cancellation that a
    direct subtraction suffers for small t.

    With w = sqrt(1 - r^2) (principal branch) and g = (1 - w)/r:
      ratio form:     1 - Re[(1 - w)/r^2] = Re[w (1 - w) / r^2]
      excursion form: 1 - Re[(1 - w)/r]   = Re[(w - (1 - r)) / r]
    """
    _check_p(p)
    if form not in CF_FORMS:
        raise ValueError(f"unknown cf form {form!r}")
    t, scalar = _as_array(t)
    w, r = _sqrt_one_minus_r2(t, p)
    if form == "ratio":
        val = np.real(w * (1.0 - w) / (r * r))
    else:
        omr = _one_minus_r(t, p)
        val = np.real((w - omr) / r)
    return float(val) if scalar else val


def cf_by_form(t, p: float, form: str):
    """phi(t) for the requested form ("ratio" or "excursion")."""
    if form == "ratio":
        return embedded_cf(t, p)
    if form == "excursion":
        return excursion_cf(t, p)
    raise ValueError(f"unknown cf form {form!r}")


def embedded_cf_closed(t, p: float = 1.0 / 3.0, corrected: bool = True):
    """Ratio-form phi through its explicit polar expansion.

    Writing z = 1 - q e^{it} (so r = p/z) and expanding
    g(r)/r = (z/p)^2 - (z/p) sqrt(z/p - 1) sqrt(z/p + 1) in modulus and
    argument gives

      phi(t) = (1 - 2 q cos t + q^2 cos 2t) / p^2
               - (|z| / p) * |z/p - 1|^{1/2} |z/p + 1|^{1/2}
                 * cos(arg z + arg(z/p - 1)/2 + arg(z/p + 1)/2)

    with arg z = arctan(-q sin t / (1 - q cos t)),
    arg(z/p - 1) = arctan(-sin t / (1 - cos t)) and
    arg(z/p + 1) = arctan(-q sin t / (1 + p - q cos t)).

    corrected=False drops the 1/p factor on the modulus of z in the
    subtracted term, reproducing a hand-expanded variant of the same
    formula that disagrees with the probabilistic form whenever p != 1;
    owk.verify emits the discrepancy report comparing both variants.
    """
    _check_p(p)
    t, scalar = _as_array(t)
    if np.any(t == 0.0):
        raise ValueError("embedded_cf_closed is undefined at t = 0; the "
                         "limit value is 1")
    q = 1.0 - p
    ct = np.cos(t)
    st = np.sin(t)
    lead = (1.0 - 2.0 * q * ct + q * q * np.cos(2.0 * t)) / (p * p)
    mod_z = np.sqrt(1.0 - 2.0 * q * ct + q * q)
    if corrected:
        mod_z = mod_z / p
    # quartic roots |z/p -+ 1|^{1/2} with
    # |z/p - s|^2 = (1/p - s)^2 - 2 (q/p)(1/p - s) cos t + (q/p)^2
    ip = 1.0 / p
    m_minus = (((ip - 1.0) ** 2 - 2.0 * (q * ip) * (ip - 1.0) * ct
                + (q * ip) ** 2) ** 0.25)
    m_plus = (((ip + 1.0) ** 2 - 2.0 * (q * ip) * (ip + 1.0) * ct
               + (q * ip) ** 2) ** 0.25)
    # half-angle arguments; 1 - cos t > 0 on (0, pi] keeps arctan finite
    a_z = np.arctan2(-q * st, 1.0 - q * ct)
    a_minus = np.arctan2(-st, 1.0 - ct)
    a_plus = np.arctan2(-q * st, 1.0 + p - q * ct)
    val = lead - mod_z * m_minus * m_plus * np.cos(a_z + 0.5 * a_minus + 0.5 * a_plus)
    return float(val) if scalar else val


def closed_form_report(p: float = 1.0 / 3.0, n_points: int = 1000) -> dict:
    """Compare embedded_cf against both closed-form variants on (0, pi].

    Returns max absolute deviations; used by the verify suite to decide
    between "agreement" and "documented discrepancy" outcomes.
    """
    t = np.linspace(np.pi / n_points, np.pi, n_points)
    ref = embedded_cf(t, p)
    diff_corr = np.abs(embedded_cf_closed(t, p, corrected=True) - ref)
    diff_raw = np.abs(embedded_cf_closed(t, p, corrected=False) - ref)
    return {
        "p": p,
        "n_points": n_points,
        "max_abs_diff_corrected": float(diff_corr.max()),
        "max_abs_diff_as_expanded": float(diff_raw.max()),
        "agrees_within_1e-9": bool(diff_corr.max() <= 1e-9),
    }


def level_cf(t, y2: int, p: float = 1.0 / 3.0):
    """Characteristic function of the hitting displacement from height y2:
    g(r(t))^{|y2|}; equals 1 when y2 = 0."""
    _check_p(p)
    t, scalar = _as_array(t)
    g = first_return_pgf(geom_cf(t, p))
    val = g ** abs(int(y2))
    return complex(val) if scalar else val


def death_chain_pgf(x, h: int):
    """E^h(x^T) = (x / (3 - 2x))^h for the chain that stays with
    probability 2/3 and moves down with probability 1/3, T the absorption
    time at 0 started from h.  Unique singularity at x = 3/2."""
    if h < 0:
        raise ValueError("h must be >= 0")
    x_arr, scalar = _as_array(x)
    if np.any(x_arr < 0.0) or np.any(x_arr >= 1.5):
        raise ValueError("death_chain_pgf requires 0 <= x < 3/2")
    val = (x_arr / (3.0 - 2.0 * x_arr)) ** h
    return float(val) if scalar else val


@dataclass
class SingularityEstimate:
    """Leading constants of the t -> 0 singularity of 1/(1 - phi):
    1/(1 - phi(t)) ~ c / sqrt(t), and c_prime = lim sqrt(x) gamma(x)
    = c sqrt(pi/2)."""

    c: float
    c_prime: float
    diagnostics: dict = field(default_factory=dict)


def extract_singularity(p: float = 1.0 / 3.0, form: str = "ratio") -> SingularityEstimate:
    """Estimate c = lim_{t->0} sqrt(t) / (1 - phi(t)) by Richardson
    extrapolation on the geometric grid t_k = pi 2^{-k}, k = 4..40.

    sqrt(t)/(1 - phi) has an expansion c + b sqrt(t) + a t + ..., so two
    extrapolation levels in h = sqrt(t) (grid ratio sqrt(2)) remove the
    h and h^2 terms.  Diagnostics carry the raw table, the extrapolation
    tables and the log-log residual slope, which should sit near 1/2
    when the sqrt(t) correction term dominates.
    """
    _check_p(p)
    ks = np.arange(4, 41)
    t = np.pi * 2.0 ** (-ks.astype(float))
    f = np.sqrt(t) / one_minus_embedded_cf(t, p, form=form)
    s2 = np.sqrt(2.0)
    lvl1 = (s2 * f[1:] - f[:-1]) / (s2 - 1.0)       # removes the h term
    lvl2 = (2.0 * lvl1[1:] - lvl1[:-1])             # removes the h^2 term
    # settle on the mid-grid extrapolants: the largest k values sit close
    # to rounding noise after two eliminations
    window = lvl2[14:24]
    c = float(np.median(window))
    tail = lvl2[-3:]
    spread = float(np.max(np.abs(tail - tail.mean())) / max(abs(c), 1e-300))
    converged = spread <= 1e-3 or float(np.ptp(window)) / abs(c) <= 1e-6
    if not converged:
        raise NumericError(
            "singularity extrapolation did not converge; table: "
            + np.array2string(lvl2, precision=12))
    # slope of the singularity-removed remainder 1/(1 - phi) - c/sqrt(t)
    # against t on a mid decade.  The remainder is sqrt(t) a(t) + b(t)
    # with b(0) = 0 for this family, so the log-log slope sits near 1/2
    # and exhibits the sqrt(t)-correction term; note that f - c itself
    # decays one power faster (like t), precisely because b(0) = 0.
    idx = slice(8, 18)
    resid = np.abs((f[idx] - c) / np.sqrt(t[idx]))
    good = resid > 1e-11 * abs(c)
    logt = np.log(t[idx][good])
    logr = np.log(resid[good])
    slope = float(np.polyfit(logt, logr, 1)[0]) if good.sum() >= 3 else float("nan")
    diag = {
        "grid_k": ks.tolist(),
        "f": f.tolist(),
        "level1": lvl1.tolist(),
        "level2": lvl2.tolist(),
        "residual_slope": slope,
        "tail_spread": spread,
        "form": form,
    }
    return SingularityEstimate(c=c, c_prime=c * np.sqrt(np.pi / 2.0), diagnostics=diag)
