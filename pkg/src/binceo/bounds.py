"""Closed-form rate-distortion bounds under the BSC test-channel model,
an exact mutual-information oracle, and constrained test-channel
optimization (minimum distortion at a fixed sum-rate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize as sp_optimize

from . import oracles
from .binmath import _check_prob, binary_convolution, binary_entropy

# Optimizer knobs: coarse grid over d1, root-finding for the sum-rate
# constraint in d2, golden-section refinement around every local minimum.
GRID_STEP = 0.005
CONSTRAINT_TOL = 1e-6
REFINE_XTOL = 1e-9
# Finite penalty for infeasible points (any true distortion is <= 1), so
# the scalar minimizer never sees non-finite values.
INFEASIBLE_PENALTY = 2.0


class InfeasibleRateError(ValueError):
    """No test-channel pair attains the requested sum-rate."""


@dataclass(frozen=True)
class TestChannelPair:
    d1: float
    d2: float

    def __post_init__(self) -> None:
        _check_prob(self.d1, "d1", upper=0.5)
        _check_prob(self.d2, "d2", upper=0.5)


@dataclass(frozen=True)
class RegionPoint:
    """Three rate lower bounds plus the distortion lower bound, in bits."""

    r1: float
    r2: float
    sum_rate: float
    distortion: float


@dataclass(frozen=True)
class OptimumResult:
    pair: TestChannelPair
    distortion: float
    achieved_sum_rate: float


def point_to_point_rate(d: float) -> float:
    """Single-link rate-distortion relation R(d) = 1 - h_b(d)."""
    _check_prob(d, "distortion", upper=0.5)
    return 1.0 - binary_entropy(d)


def bsc_bounds(p1: float, p2: float, tc: TestChannelPair) -> RegionPoint:
    """Closed-form bounds for BSC observation noise and BSC test channels."""
    _check_prob(p1, "p1", upper=0.5)
    _check_prob(p2, "p2", upper=0.5)
    p = binary_convolution(p1, p2)
    d = binary_convolution(tc.d1, tc.d2)
    h_pd = binary_entropy(binary_convolution(p, d))
    h_d1 = binary_entropy(tc.d1)
    h_d2 = binary_entropy(tc.d2)
    return RegionPoint(
        r1=h_pd - h_d1,
        r2=h_pd - h_d2,
        sum_rate=1.0 + h_pd - h_d1 - h_d2,
        distortion=(
            binary_entropy(binary_convolution(p1, tc.d1))
            + binary_entropy(binary_convolution(p2, tc.d2))
            - h_pd
        ),
    )


def mi_region_oracle(p1: float, p2: float, tc: TestChannelPair) -> RegionPoint:
    """Same region point computed from the exact 32-entry joint pmf.

    r1 = I(Y1;U1|U2), r2 = I(Y2;U2|U1), sum_rate = I(Y1,Y2;U1,U2),
    distortion = H(X|U1,U2), all by direct summation.
    """
    pmf = oracles.enumerate_joint(p1, p2, tc.d1, tc.d2)
    H = lambda *axes: oracles.marginal_entropy(pmf, axes)
    X, Y1, Y2, U1, U2 = (
        oracles.AXIS_X,
        oracles.AXIS_Y1,
        oracles.AXIS_Y2,
        oracles.AXIS_U1,
        oracles.AXIS_U2,
    )
    r1 = H(Y1, U2) + H(U1, U2) - H(Y1, U1, U2) - H(U2)
    r2 = H(Y2, U1) + H(U1, U2) - H(Y2, U1, U2) - H(U1)
    sum_rate = H(Y1, Y2) + H(U1, U2) - H(Y1, Y2, U1, U2)
    distortion = H(X, U1, U2) - H(U1, U2)
    return RegionPoint(r1=r1, r2=r2, sum_rate=sum_rate, distortion=distortion)


def _sum_rate(p: float, d1: float, d2: float) -> float:
    d = binary_convolution(d1, d2)
    return (
        1.0
        + binary_entropy(binary_convolution(p, d))
        - binary_entropy(d1)
        - binary_entropy(d2)
    )


def _distortion(p1: float, p2: float, d1: float, d2: float) -> float:
    p = binary_convolution(p1, p2)
    d = binary_convolution(d1, d2)
    return (
        binary_entropy(binary_convolution(p1, d1))
        + binary_entropy(binary_convolution(p2, d2))
        - binary_entropy(binary_convolution(p, d))
    )


def _d2_on_constraint(p: float, d1: float, target: float) -> float | None:
    """Solve sum_rate(d1, d2) = target for d2 in [0, 0.5], or None."""
    lo = _sum_rate(p, d1, 0.5)
    hi = _sum_rate(p, d1, 0.0)
    if target > hi or target < lo:
        return None
    if target == hi:
        return 0.0
    if target == lo:
        return 0.5
    return float(
        sp_optimize.brentq(
            lambda d2: _sum_rate(p, d1, d2) - target, 0.0, 0.5, xtol=REFINE_XTOL
        )
    )


def optimize_test_channels(
    p1: float, p2: float, target_sum_rate: float, grid_step: float = GRID_STEP
) -> OptimumResult:
    """Minimize the closed-form distortion at a fixed sum-rate.

    The problem is non-convex, so the search walks a coarse d1 grid along
    the constraint manifold, records every local minimum, refines each by
    bounded golden-section search, and returns the best.
    """
    _check_prob(p1, "p1", upper=0.5)
    _check_prob(p2, "p2", upper=0.5)
    target = float(target_sum_rate)
    if not 0.0 < target <= 2.0:
        raise ValueError(f"target sum-rate must be in (0, 2], got {target!r}")
    p = binary_convolution(p1, p2)
    max_rate = _sum_rate(p, 0.0, 0.0)
    if target > max_rate + 1e-12:
        raise InfeasibleRateError(
            f"sum-rate {target} exceeds the maximum {max_rate:.6f} at d1=d2=0"
        )

    def constrained_distortion(d1: float) -> float:
        d2 = _d2_on_constraint(p, d1, target)
        if d2 is None:
            return INFEASIBLE_PENALTY
        return _distortion(p1, p2, d1, d2)

    grid = np.arange(0.0, 0.5 + grid_step / 2, grid_step)
    vals = np.array([constrained_distortion(d1) for d1 in grid])
    feasible = vals < INFEASIBLE_PENALTY
    if not np.any(feasible):
        raise InfeasibleRateError(f"no (d1, d2) attains sum-rate {target}")

    # Local minima of the gridded profile (plateau-tolerant at the edges).
    candidates: list[int] = []
    for i in np.flatnonzero(feasible):
        left = vals[i - 1] if i > 0 else INFEASIBLE_PENALTY
        right = vals[i + 1] if i < len(vals) - 1 else INFEASIBLE_PENALTY
        if vals[i] <= left and vals[i] <= right:
            candidates.append(i)

    best: OptimumResult | None = None
    for i in candidates:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        res = sp_optimize.minimize_scalar(
            constrained_distortion,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": REFINE_XTOL},
        )
        d1 = float(res.x)
        d2 = _d2_on_constraint(p, d1, target)
        if d2 is None:
            continue
        achieved = _sum_rate(p, d1, d2)
        cand = OptimumResult(
            pair=TestChannelPair(d1=d1, d2=d2),
            distortion=_distortion(p1, p2, d1, d2),
            achieved_sum_rate=achieved,
        )
        if best is None or cand.distortion < best.distortion:
            best = cand
    assert best is not None
    if abs(best.achieved_sum_rate - target) > CONSTRAINT_TOL:
        raise InfeasibleRateError(
            f"constraint violated: achieved {best.achieved_sum_rate} vs {target}"
        )
    return best


def sweep_bound_curve(
    p1: float, p2: float, rate_grid
) -> list[tuple[float, float]]:
    """Minimum distortion per sum-rate grid point (non-increasing in rate)."""
    out = []
    for rate in rate_grid:
        res = optimize_test_channels(p1, p2, rate)
        out.append((float(rate), res.distortion))
    return out
