"""Two-objective (attack success + estimator variance) parameter tuning.

The scalarized objective is w_asr * expected_asr + w_mse * analytic_mse with
per-user variance (n=1) by default.  The four adaptive solvers minimize it
over their family's free parameter: integer grids for the subset size and
hash range, a 1024-point coarse grid plus bounded scalar refinement for the
continuous keep-probability and threshold.  Objective terms are summed raw
(no normalization beyond the weights), so weight semantics depend on
(eps, k, n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .model import (
    EmptyCandidates,
    Family,
    NonFinite,
    ProtocolConfig,
    RangeError,
)
from .attacks import expected_asr
from .protocols import analytic_mse, olh_g, ss_default_omega, ue_pair_from_p

COARSE_GRID_POINTS = 1024
REFINE_TOL = 1e-6
# continuous UE keep-probabilities approach but never reach 1; this cap keeps
# the tightness identity numerically stable at the boundary
_P_CAP = 1.0 - 1e-6


@dataclass(frozen=True)
class ObjectiveWeights:
    """Convex weights for the two objectives; must sum to 1."""

    w_asr: float
    w_mse: float

    def __post_init__(self):
        for name, v in (("w_asr", self.w_asr), ("w_mse", self.w_mse)):
            if not (isinstance(v, (int, float)) and 0 <= v <= 1):
                raise RangeError(name, "a real in [0, 1]", v)
        if abs(self.w_asr + self.w_mse - 1) > 1e-12:
            raise RangeError("w_asr + w_mse", "1 within 1e-12",
                             self.w_asr + self.w_mse)

    @classmethod
    def from_w_asr(cls, w_asr: float) -> "ObjectiveWeights":
        return cls(w_asr, 1.0 - w_asr)


@dataclass(frozen=True)
class OptimizationResult:
    """Solver output: chosen parameter, objective value and its components,
    and how many objective evaluations were spent."""

    theta_star: float
    objective_value: float
    asr_at_opt: float
    mse_at_opt: float
    evaluations: int
    config: ProtocolConfig


def objective(cfg: ProtocolConfig, weights: ObjectiveWeights, n: float = 1) -> float:
    """w_asr * expected_asr(cfg) + w_mse * analytic_mse(cfg, n)."""
    return (weights.w_asr * expected_asr(cfg)
            + weights.w_mse * analytic_mse(cfg, n))


def minimize_scalar_bounded(f, lo: float, hi: float, tol: float = REFINE_TOL):
    """Minimize f on [lo, hi] to within tol of a stationary point or boundary.

    Returns (x*, f*).  Raises NonFinite when any probe of f is not finite.
    """
    if not lo < hi:
        raise RangeError("(lo, hi)", "lo < hi", (lo, hi))

    def checked(x):
        v = f(x)
        if not math.isfinite(v):
            raise NonFinite(x, v)
        return v

    res = minimize_scalar(checked, bounds=(lo, hi), method="bounded",
                          options={"xatol": tol})
    return float(res.x), float(res.fun)


class _CountingObjective:
    """Wraps an objective, counting evaluations."""

    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.f(x)


def grid_search(f, candidates):
    """Exhaustive argmin over candidates; ties go to the smallest candidate.

    Returns (x*, f*).
    """
    best_x = None
    best_f = None
    seen = False
    for c in candidates:
        seen = True
        v = f(c)
        if best_f is None or v < best_f or (v == best_f and c < best_x):
            best_x, best_f = c, v
    if not seen:
        raise EmptyCandidates("no candidates to search")
    return best_x, best_f


def _result(cfg: ProtocolConfig, theta_star, weights: ObjectiveWeights,
            n: float, evaluations: int) -> OptimizationResult:
    asr = expected_asr(cfg)
    mse = analytic_mse(cfg, n)
    return OptimizationResult(theta_star, weights.w_asr * asr + weights.w_mse * mse,
                              asr, mse, evaluations, cfg)


def optimize_ass(eps: float, k: int, weights: ObjectiveWeights,
                 n: float = 1) -> OptimizationResult:
    """Best subset size: integer grid search over omega in [1, k-1].

    At w_asr = 0 the solver returns the variance-optimal baseline
    round(k/(e^eps+1)) directly (baseline recovery) rather than the grid
    argmin of the first-order variance, whose flat left tail would otherwise
    drift to omega = 1.
    """
    if k < 2:
        raise RangeError("k", "an integer >= 2", k)
    if weights.w_asr == 0:
        w = ss_default_omega(eps, k)
        cfg = ProtocolConfig(Family.SS, eps, k, omega=w)
        return _result(cfg, w, weights, n, 1)

    def f(w):
        return objective(ProtocolConfig(Family.SS, eps, k, omega=w), weights, n)

    w, _ = grid_search(f, range(1, k))
    cfg = ProtocolConfig(Family.SS, eps, k, omega=w)
    return _result(cfg, w, weights, n, k - 1)


def _cfg_ue(eps: float, k: int, p: float) -> ProtocolConfig:
    p, q = ue_pair_from_p(eps, p)
    return ProtocolConfig(Family.UE, eps, k, p=p, q=q)


def optimize_aue(eps: float, k: int, weights: ObjectiveWeights,
                 n: float = 1) -> OptimizationResult:
    """Best keep-probability p in [0.5, 1) with the tight q substituted in:
    1024-point coarse grid, then bounded refinement in the best grid cell."""

    f = _CountingObjective(lambda p: objective(_cfg_ue(eps, k, p), weights, n))
    grid = np.linspace(0.5, 1.0, COARSE_GRID_POINTS + 1)[:COARSE_GRID_POINTS]
    p0, f0 = grid_search(f, grid.tolist())
    step = 0.5 / COARSE_GRID_POINTS
    lo = max(0.5, p0 - step)
    hi = min(_P_CAP, p0 + step)
    pr, fr = minimize_scalar_bounded(f, lo, hi, REFINE_TOL)
    p_star = pr if fr < f0 else p0
    cfg = _cfg_ue(eps, k, p_star)
    return _result(cfg, p_star, weights, n, f.calls)


def optimize_alh(eps: float, k: int, weights: ObjectiveWeights,
                 n: float = 1) -> OptimizationResult:
    """Best hash range: integer grid search over g in [2, max(k, round(e^eps+1))]."""
    hi = max(k, olh_g(eps))

    def f(g):
        return objective(ProtocolConfig(Family.LH, eps, k, g=g), weights, n)

    g, _ = grid_search(f, range(2, hi + 1))
    cfg = ProtocolConfig(Family.LH, eps, k, g=g)
    return _result(cfg, g, weights, n, hi - 1)


def optimize_athe(eps: float, k: int, weights: ObjectiveWeights,
                  n: float = 1) -> OptimizationResult:
    """Best threshold theta in [0.5, 1]: coarse grid plus bounded refinement."""

    f = _CountingObjective(
        lambda t: objective(ProtocolConfig(Family.THE, eps, k, theta=t), weights, n))
    grid = np.linspace(0.5, 1.0, COARSE_GRID_POINTS)
    t0, f0 = grid_search(f, grid.tolist())
    step = 0.5 / (COARSE_GRID_POINTS - 1)
    lo = max(0.5, t0 - step)
    hi = min(1.0, t0 + step)
    tr, fr = minimize_scalar_bounded(f, lo, hi, REFINE_TOL)
    t_star = tr if fr < f0 else t0
    cfg = ProtocolConfig(Family.THE, eps, k, theta=t_star)
    return _result(cfg, t_star, weights, n, f.calls)
