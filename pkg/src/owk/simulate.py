"""Seeded Monte Carlo engine for the half-plane one-way walk.

The bulk samplers are numba kernels specialised to the standard walk on
H (uniform steps, eps_0 = 0); the generic python-level walker in
run_excursion works for any orientation and drift and is the reference
implementation the kernels are tested against.

Step law on H: at height h != 0 the walk moves up, down or horizontally
(direction sign(h)) with probability 1/3 each; at height 0 it moves up
or down with probability 1/2.  The optional row-0 self-loop variant
gives height 0 three outcomes (up, down, stay) with probability 1/3,
reading the lattice definition's degenerate horizontal edge literally.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import numba
from numba import njit, prange

from .lattice import HALF_PLANE, LatticePoint, Orientation, WalkParams, transition_kernel
from .rng import SeededStream, next_unit, stream_state


def _apply_thread_cap():
    cap = os.environ.get("OWK_THREADS")
    if cap:
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))


@dataclass
class EpisodeStats:
    """One simulated excursion: first return time of the height to 0,
    the horizontal displacement there, and per-site visit counts over
    times 0 <= t < tau1 (time 0 included, tau1 excluded)."""

    start: LatticePoint
    tau1: int
    x_sigma1: int
    visits: dict
    truncated: bool


@dataclass
class EstimateWithError:
    value: float
    std_error: float
    n_samples: int
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# compiled kernels (standard walk on H)

@njit(cache=True, inline="always")
def _step_h(x, h, state, selfloop):
    """One step of the standard walk on H from (x, h)."""
    state, u = next_unit(state)
    if h == 0:
        if selfloop:
            if u < 1.0 / 3.0:
                h += 1
            elif u < 2.0 / 3.0:
                h -= 1
            # else: degenerate horizontal edge, stay put
        else:
            if u < 0.5:
                h += 1
            else:
                h -= 1
    else:
        if u < 1.0 / 3.0:
            h += 1
        elif u < 2.0 / 3.0:
            h -= 1
        else:
            x += 1 if h > 0 else -1
    return x, h, state


@njit(cache=True, parallel=True)
def _excursion_batch(x0, h0, n, horizon, seed, stream_id, selfloop):
    """Excursions until the height first returns to 0 (at time >= 1)."""
    xs = np.zeros(n, dtype=np.int64)
    taus = np.zeros(n, dtype=np.int64)
    trunc = np.zeros(n, dtype=np.uint8)
    horiz = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        state = stream_state(seed, stream_id, i)
        x = x0
        h = h0
        steps = 0
        hs = 0
        while steps < horizon:
            xp = x
            x, h, state = _step_h(x, h, state, selfloop)
            steps += 1
            if x != xp:
                hs += 1
            if h == 0:
                break
        xs[i] = x
        taus[i] = steps
        horiz[i] = hs
        if h != 0:
            trunc[i] = 1
    return xs, taus, trunc, horiz


@njit(cache=True, parallel=True)
def _excursion_site_visits(x0, h0, y1, y2, n, horizon, seed, stream_id):
    """Visits to site (y1, y2) strictly before the height hits 0, plus
    the terminal horizontal coordinate; time 0 counts as a visit."""
    visits = np.zeros(n, dtype=np.int64)
    xs = np.zeros(n, dtype=np.int64)
    trunc = np.zeros(n, dtype=np.uint8)
    for i in prange(n):
        state = stream_state(seed, stream_id, i)
        x = x0
        h = h0
        v = 0
        if x == y1 and h == y2:
            v += 1
        steps = 0
        while steps < horizon:
            x, h, state = _step_h(x, h, state, False)
            steps += 1
            if h == 0:
                break
            if x == y1 and h == y2:
                v += 1
        visits[i] = v
        xs[i] = x
        if h != 0:
            trunc[i] = 1
    return visits, xs, trunc


@njit(cache=True, parallel=True)
def _green_visits(x0, h0, y1, y2, n, horizon, seed, stream_id):
    """Visits to (y1, y2) within the horizon, no stopping (full walk)."""
    visits = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        state = stream_state(seed, stream_id, i)
        x = x0
        h = h0
        v = 0
        if x == y1 and h == y2:
            v += 1
        for _ in range(horizon):
            x, h, state = _step_h(x, h, state, False)
            if x == y1 and h == y2:
                v += 1
        visits[i] = v
    return visits


@njit(cache=True, parallel=True)
def _death_chain_T(h0, n, seed, stream_id):
    """Absorption time samples of the stay-2/3 / down-1/3 chain from h0."""
    ts = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        state = stream_state(seed, stream_id, i)
        h = h0
        steps = 0
        while h > 0:
            state, u = next_unit(state)
            if u < 1.0 / 3.0:
                h -= 1
            steps += 1
        ts[i] = steps
    return ts


# ---------------------------------------------------------------------------
# python-level reference walker

def step(u: LatticePoint, o: Orientation, w: WalkParams, rng) -> LatticePoint:
    """Sample one step from u; rng is a SeededStream or numpy Generator."""
    gen = rng.generator() if isinstance(rng, SeededStream) else rng
    kernel = transition_kernel(u, o, w)
    points = list(kernel.keys())
    probs = np.array([float(kernel[v]) for v in points])
    idx = int(gen.choice(len(points), p=probs / probs.sum()))
    return points[idx]


def run_excursion(start: LatticePoint, o: Orientation = HALF_PLANE,
                  w: WalkParams = WalkParams(), rng: SeededStream = SeededStream(),
                  horizon: int = 100000) -> EpisodeStats:
    """Simulate until the height first returns to 0 at a time >= 1 (or
    until the horizon), recording visit counts over [0, tau1)."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    gen = rng.generator() if isinstance(rng, SeededStream) else rng
    u = start
    visits = {start.as_tuple(): 1}
    steps = 0
    while steps < horizon:
        u = step(u, o, w, gen)
        steps += 1
        if u.v2 == 0:
            break
        visits[u.as_tuple()] = visits.get(u.as_tuple(), 0) + 1
    truncated = u.v2 != 0
    return EpisodeStats(start=start, tau1=steps, x_sigma1=u.v1,
                        visits=visits, truncated=truncated)


# ---------------------------------------------------------------------------
# bulk estimators

def sample_excursions(start: LatticePoint, n: int, rng: SeededStream,
                      horizon: int = 100000, selfloop: bool = False) -> dict:
    """n excursions of the standard walk on H from `start` (compiled path).

    Returns arrays x_sigma1, tau1, truncated, horizontal_steps; the
    pathwise identity tau1 = vertical steps + horizontal steps gives the
    vertical count as tau1 - horizontal_steps.
    """
    _apply_thread_cap()
    xs, taus, trunc, horiz = _excursion_batch(
        np.int64(start.v1), np.int64(start.v2), np.int64(n), np.int64(horizon),
        np.uint64(rng.seed), np.uint64(rng.stream_id), selfloop)
    return {"x_sigma1": xs, "tau1": taus, "truncated": trunc.astype(bool),
            "horizontal_steps": horiz}


def empirical_cf(samples, t_grid, n_batches: int = 100):
    """Empirical characteristic function with batch-mean standard errors.

    Returns (values, se) where values[j] = mean e^{i t_j X} and se[j]
    estimates the standard error of its real part (the imaginary part
    has comparable error and is itself a symmetry diagnostic).
    """
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("empirical_cf requires nonempty samples")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    phases = np.exp(1j * np.outer(t_grid, samples))
    values = phases.mean(axis=1)
    n_batches = max(2, min(n_batches, samples.size))
    usable = (samples.size // n_batches) * n_batches
    batched = np.real(phases[:, :usable]).reshape(len(t_grid), n_batches, -1).mean(axis=2)
    se = batched.std(axis=1, ddof=1) / np.sqrt(n_batches)
    return values, se


def estimate_green(x: LatticePoint, y: LatticePoint, n_walks: int,
                   horizon: int, rng: SeededStream) -> EstimateWithError:
    """MC estimate of the Green function G(x, y) = expected visits to y
    within the horizon; the visit at time 0 counts, and truncation makes
    the estimate a one-sided underestimate of the infinite-horizon value."""
    if n_walks < 1:
        raise ValueError("n_walks must be >= 1")
    _apply_thread_cap()
    visits = _green_visits(np.int64(x.v1), np.int64(x.v2),
                           np.int64(y.v1), np.int64(y.v2),
                           np.int64(n_walks), np.int64(horizon),
                           np.uint64(rng.seed), np.uint64(rng.stream_id))
    v = visits.astype(float)
    return EstimateWithError(value=float(v.mean()),
                             std_error=float(v.std(ddof=1) / np.sqrt(n_walks)) if n_walks > 1 else 0.0,
                             n_samples=n_walks)


def estimate_death_chain_pgf(x: float, h: int, n_walks: int,
                             rng: SeededStream) -> EstimateWithError:
    """MC estimate of E^h(x^T) for the stay-2/3 / down-1/3 death chain."""
    if not (0.0 < x < 1.0):
        raise ValueError("estimate_death_chain_pgf requires 0 < x < 1")
    if h == 0:
        return EstimateWithError(value=1.0, std_error=0.0, n_samples=n_walks)
    _apply_thread_cap()
    ts = _death_chain_T(np.int64(h), np.int64(n_walks),
                        np.uint64(rng.seed), np.uint64(rng.stream_id))
    vals = x ** ts.astype(float)
    return EstimateWithError(value=float(vals.mean()),
                             std_error=float(vals.std(ddof=1) / np.sqrt(n_walks)),
                             n_samples=n_walks)


def estimate_hitting_prob_gu(u: int, y2: int, y1: int, n_walks: int,
                             rng: SeededStream, horizon: int = 100000) -> EstimateWithError:
    """MC estimate of g_u(y2) = P^{(y1,u)}(visit site (y1, y2) before the
    height hits 0 | excursion endpoint >= y1), by rejection sampling on
    the conditioning event."""
    if u < 0 or y2 < 0:
        raise ValueError("u and y2 must be >= 0")
    if u == y2:
        return EstimateWithError(value=1.0, std_error=0.0, n_samples=n_walks)
    _apply_thread_cap()
    visits, xs, trunc = _excursion_site_visits(
        np.int64(y1), np.int64(u), np.int64(y1), np.int64(y2),
        np.int64(n_walks), np.int64(horizon),
        np.uint64(rng.seed), np.uint64(rng.stream_id))
    ok = ~trunc.astype(bool)
    accepted = ok & (xs >= y1)
    n_acc = int(accepted.sum())
    if n_acc < max(1, 1e-4 * n_walks):
        raise RuntimeError(
            f"conditioning event too rare: acceptance {n_acc}/{n_walks}; "
            "increase n_walks or move the start closer to the record")
    succ = (visits[accepted] > 0).astype(float)
    return EstimateWithError(
        value=float(succ.mean()),
        std_error=float(succ.std(ddof=1) / np.sqrt(n_acc)) if n_acc > 1 else 1.0,
        n_samples=n_acc,
        extra={"acceptance_rate": n_acc / n_walks,
               "truncation_rate": float(trunc.mean())})


def occupation_site_visits(x: LatticePoint, y: LatticePoint, n_walks: int,
                           rng: SeededStream, horizon: int = 100000) -> EstimateWithError:
    """Raw MC mean of visits to y strictly before the height hits 0,
    started from x with x.v2 != 0 (compiled path; no structural
    shortcuts -- see owk.martin.occupation_before_return)."""
    _apply_thread_cap()
    visits, _, trunc = _excursion_site_visits(
        np.int64(x.v1), np.int64(x.v2), np.int64(y.v1), np.int64(y.v2),
        np.int64(n_walks), np.int64(horizon),
        np.uint64(rng.seed), np.uint64(rng.stream_id))
    v = visits.astype(float)
    return EstimateWithError(value=float(v.mean()),
                             std_error=float(v.std(ddof=1) / np.sqrt(n_walks)) if n_walks > 1 else 0.0,
                             n_samples=n_walks,
                             extra={"truncation_rate": float(trunc.mean())})
