"""Oriented two-dimensional lattices and their random-walk kernels.

A horizontally oriented lattice is Z^2 with vertical edges in both
directions on every column and, on row y, a single horizontal edge in
direction eps_y in {-1, 0, +1}.  eps_y = 0 means the row has no
horizontal edge at all, so vertices there have out-degree 2.  The
half-plane one-way lattice H is the special case eps_0 = 0,
eps_y = sign(y).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class LatticeError(ValueError):
    """Structural or validation problem with a lattice query."""


def _sgn(y: int) -> int:
    return (y > 0) - (y < 0)


def _iid_eps(seed: int, y: int, f: float) -> int:
    """Deterministic +-1 orientation for row y from a counter-based hash.

    Uses the splitmix64 finalizer on (seed, y) so evaluation order never
    matters: repeated queries of the same row always agree.
    """
    with np.errstate(over="ignore"):
        z = (np.uint64(seed) * np.uint64(0x9E3779B97F4A7C15)) ^ np.uint64(y & 0xFFFFFFFFFFFFFFFF)
        z = np.uint64(z) + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    u = float(z) / float(2**64)
    return 1 if u < f else -1


@dataclass(frozen=True)
class Orientation:
    """Row-indexed horizontal edge directions eps_y.

    kind is one of "half-plane-sign", "constant", "alternating",
    "iid-random", "table".  Evaluation is lazy and pure: eps(y) for a
    fixed Orientation value is a function of y alone.
    """

    kind: str = "half-plane-sign"
    value: int = 1                      # for kind == "constant"
    f: float = 0.5                      # P(eps = +1) for iid-random
    seed: int = 0                       # for iid-random
    rows: Optional[dict] = None         # for kind == "table"

    def __post_init__(self):
        kinds = {"half-plane-sign", "constant", "alternating", "iid-random", "table"}
        if self.kind not in kinds:
            raise LatticeError(f"unknown orientation kind {self.kind!r}")
        if self.kind == "constant" and self.value not in (-1, 1):
            raise LatticeError("constant orientation requires value in {-1, +1}")
        if self.kind == "iid-random" and not (0.0 <= self.f <= 1.0):
            raise LatticeError("iid-random orientation requires f in [0, 1]")
        if self.kind == "table" and self.rows is None:
            raise LatticeError("table orientation requires a rows mapping")

    def eps(self, y: int) -> int:
        if self.kind == "half-plane-sign":
            return _sgn(y)
        if self.kind == "constant":
            return self.value
        if self.kind == "alternating":
            return 1 if y % 2 == 0 else -1
        if self.kind == "iid-random":
            return _iid_eps(self.seed, y, self.f)
        # table: rows absent from the table have no horizontal edge
        e = self.rows.get(y, self.rows.get(str(y), 0))
        if e not in (-1, 0, 1):
            raise LatticeError(f"table orientation has eps_{y} = {e!r}")
        return int(e)

    @staticmethod
    def from_config(cfg: dict) -> "Orientation":
        """Build an Orientation from a JSON-style config dict."""
        kind = cfg.get("kind", "half-plane-sign")
        rows = cfg.get("rows")
        if rows is not None:
            rows = {int(k): int(v) for k, v in rows.items()}
        return Orientation(
            kind=kind,
            value=int(cfg.get("value", 1)),
            f=float(cfg.get("f", 0.5)),
            seed=int(cfg.get("seed", 0)),
            rows=rows,
        )


HALF_PLANE = Orientation(kind="half-plane-sign")


@dataclass(frozen=True)
class LatticePoint:
    v1: int
    v2: int

    def as_tuple(self):
        return (self.v1, self.v2)


@dataclass(frozen=True)
class DriftProfile:
    """Per-row step probabilities: horizontal p_y, up q_y, down 1-p_y-q_y.

    Stored as a mapping row -> (p_y, q_y); rows absent from the table
    fall back to the default pair.
    """

    default: tuple = (1.0 / 3.0, 1.0 / 3.0)
    rows: dict = field(default_factory=dict)

    def at(self, y: int):
        p_y, q_y = self.rows.get(y, self.default)
        if not (0.0 <= p_y < 1.0):
            raise LatticeError(f"drift p_{y} = {p_y} outside [0, 1)")
        if not (q_y > 0.0 and q_y < 1.0 - p_y):
            raise LatticeError(f"drift q_{y} = {q_y} violates 0 < q_y < 1 - p_y")
        return p_y, q_y


@dataclass(frozen=True)
class WalkParams:
    """Geometric-excursion parameter p (q = 1 - p) and optional drift."""

    p: float = 1.0 / 3.0
    drift: Optional[DriftProfile] = None

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise LatticeError(f"p = {self.p} outside (0, 1)")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @staticmethod
    def from_config(cfg: dict) -> "WalkParams":
        drift = None
        if "drift" in cfg and cfg["drift"]:
            rows = {int(d["y"]): (float(d["p"]), float(d["q"])) for d in cfg["drift"]}
            drift = DriftProfile(rows=rows)
        return WalkParams(p=float(cfg.get("p", 1.0 / 3.0)), drift=drift)


def out_neighbors(u: LatticePoint, o: Orientation) -> list:
    """Out-neighbors of u: both vertical neighbors, plus the horizontal
    neighbor in direction eps when the row is oriented."""
    nbrs = [LatticePoint(u.v1, u.v2 + 1), LatticePoint(u.v1, u.v2 - 1)]
    e = o.eps(u.v2)
    if e != 0:
        nbrs.append(LatticePoint(u.v1 + e, u.v2))
    return nbrs


def transition_kernel(u: LatticePoint, o: Orientation, w: WalkParams) -> dict:
    """One-step transition probabilities out of u as {point: mass}.

    Without drift this is the simple random walk (uniform over
    out-neighbors).  With drift, masses are (p_y, q_y, 1 - p_y - q_y) on
    (horizontal, up, down); a drifted row must be oriented.
    """
    nbrs = out_neighbors(u, o)
    if not nbrs:
        raise LatticeError(f"vertex {u} has zero out-degree")
    if w.drift is None:
        from fractions import Fraction
        mass = Fraction(1, len(nbrs))
        return {v: mass for v in nbrs}
    p_y, q_y = w.drift.at(u.v2)
    e = o.eps(u.v2)
    if e == 0 and p_y != 0.0:
        raise LatticeError(f"row {u.v2} has no horizontal edge but drift p = {p_y}")
    table = {
        LatticePoint(u.v1, u.v2 + 1): q_y,
        LatticePoint(u.v1, u.v2 - 1): 1.0 - p_y - q_y,
    }
    if e != 0:
        table[LatticePoint(u.v1 + e, u.v2)] = p_y
    return table


def is_transitive(o: Orientation, probe_rows) -> bool:
    """Finite-window transitivity check: both +1 and -1 occur among
    {eps_y : y in probe_rows}.

    Full transitivity of a lazily defined orientation is undecidable;
    the caller owns the choice of a representative probe range.
    """
    probe_rows = list(probe_rows)
    if not probe_rows:
        raise LatticeError("probe_rows must be nonempty")
    values = {o.eps(y) for y in probe_rows}
    return (1 in values) and (-1 in values)


def vertical_projection_chain(w: WalkParams, rows) -> dict:
    """Kernel of the drifted walk's vertical projection on the given rows:
    p(x, x) = p_x, p(x, x+1) = q_x, p(x, x-1) = 1 - p_x - q_x."""
    if w.drift is None:
        raise LatticeError("vertical_projection_chain requires a drift profile")
    kernel = {}
    for y in rows:
        p_y, q_y = w.drift.at(y)
        kernel[y] = {y: p_y, y + 1: q_y, y - 1: 1.0 - p_y - q_y}
    return kernel
