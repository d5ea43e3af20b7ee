"""Counter-based seeded random streams.

Python-level sampling uses numpy's Philox generator keyed by
(seed, stream_id); the compiled Monte Carlo kernels use a splitmix64
stream whose initial state is a hash of (seed, stream_id, walker_id).
Both are deterministic functions of their keys, so identical keys give
identical sequences and distinct stream ids give statistically
independent ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, uint64

_GAMMA = uint64(0x9E3779B97F4A7C15)


@njit(cache=True, inline="always")
def _mix64(z):
    z = uint64(z)
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def stream_state(seed, stream_id, walker_id):
    """Initial splitmix64 state for one walker of one stream."""
    s = _mix64(uint64(seed) + _GAMMA)
    s = _mix64(s ^ _mix64(uint64(stream_id) + _GAMMA))
    return _mix64(s ^ _mix64(uint64(walker_id) + _GAMMA))


@njit(cache=True, inline="always")
def next_unit(state):
    """Advance the splitmix64 state; return (new_state, uniform in [0, 1))."""
    state = uint64(state) + _GAMMA
    z = _mix64(state)
    return state, (z >> uint64(11)) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class SeededStream:
    """A reproducible random stream identified by (seed, stream_id)."""

    seed: int = 0
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=[self.seed & 0xFFFFFFFFFFFFFFFF,
                                                         self.stream_id & 0xFFFFFFFFFFFFFFFF]))

    def child(self, stream_id: int) -> "SeededStream":
        return SeededStream(seed=self.seed, stream_id=stream_id)
