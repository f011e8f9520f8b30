"""Predictor-corrector path tracking along parameter segments.

The predictor integrates the Davidenko equation dx/dt = -J^{-1} dF/dt with
classical RK4; the corrector runs Newton at fixed t.  Residuals are measured
with ``ParameterizedSystem.residual_norm`` (max-norm relative to max(1, |p|)).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


class PathStatus(str, enum.Enum):
    SUCCESS = "success"
    DIVERGED = "diverged"
    STEP_UNDERFLOW = "step_underflow"
    MAX_STEPS = "max_steps"
    SINGULAR = "singular"
    REFINE_FAILED = "refine_failed"


@dataclass(frozen=True)
class TrackerConfig:
    corrector_tol: float = 1e-9
    newton_iters_max: int = 3
    step_initial: float = 0.05
    step_min: float = 1e-7
    step_growth: float = 1.5
    growth_after: int = 4
    step_shrink: float = 0.5
    refine_tol: float = 1e-12
    refine_iters: int = 8
    max_steps: int = 10000
    divergence_norm: float = 1e8

    def __post_init__(self):
        if not 0 < self.step_min < self.step_initial <= 1:
            raise ValueError("need 0 < step_min < step_initial <= 1")
        if not self.step_shrink < 1 < self.step_growth:
            raise ValueError("need step_shrink < 1 < step_growth")


@dataclass(frozen=True)
class PathResult:
    status: PathStatus
    endpoint: np.ndarray
    final_residual: float
    steps_taken: int
    rejects: int
    t_reached: float

    @property
    def ok(self) -> bool:
        return self.status is PathStatus.SUCCESS


class SingularJacobianError(np.linalg.LinAlgError):
    pass


def _solve(J, b):
    try:
        return np.linalg.solve(J, b)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobianError(str(exc)) from exc


def refine(system, p, x, tol: float = 1e-12, iters: int = 8) -> tuple[np.ndarray, float]:
    """Newton at fixed parameters until the scaled residual is <= tol.

    Raises SingularJacobianError when an iterate has a singular Jacobian.
    """
    x = np.array(x, dtype=complex)
    res = system.residual_norm(x, p)
    for _ in range(iters):
        if res <= tol:
            break
        x_new = x + _solve(system.jacobian(x, p), -system.residual(x, p))
        res_new = system.residual_norm(x_new, p)
        if not np.all(np.isfinite(x_new)) or res_new > res:
            break
        x, res = x_new, res_new
    return x, res


class _Homotopy:
    def __init__(self, system, path):
        self.system = system
        self.path = path

    def velocity(self, x, t):
        p = self.path.params(t)
        Ht = self.system.parameter_dt(x, p, self.path.dparams(t))
        return _solve(self.system.jacobian(x, p), -Ht)

    def rk4(self, x, t, h):
        k1 = self.velocity(x, t)
        k2 = self.velocity(x + 0.5 * h * k1, t + 0.5 * h)
        k3 = self.velocity(x + 0.5 * h * k2, t + 0.5 * h)
        k4 = self.velocity(x + h * k3, t + h)
        return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    def correct(self, x, t, config: TrackerConfig):
        p = self.path.params(t)
        scale = max(1.0, float(np.max(np.abs(p))))
        prev = np.inf
        for _ in range(config.newton_iters_max):
            F = self.system.residual(x, p)
            if np.max(np.abs(F)) / scale <= config.corrector_tol:
                return x, True
            dx = _solve(self.system.jacobian(x, p), -F)
            size = float(np.linalg.norm(dx))
            # corrections must contract, otherwise the predictor left the basin
            if size > 0.5 * prev:
                return x, False
            prev = size
            x = x + dx
        return x, self.system.residual_norm(x, p) <= config.corrector_tol


def track(system, start, end, x_start, config: TrackerConfig = TrackerConfig()) -> PathResult:
    """Continue ``x_start`` from t=0 to t=1 along ``system.path(start, end)``.

    For linear systems ``start``/``end`` are parameter vectors; for pushforward
    systems they are latent points.  Failures are reported in the status.
    """
    path = system.path(start, end)
    x = np.array(x_start, dtype=complex)
    if path.is_constant:
        p = path.params(1.0)
        return PathResult(PathStatus.SUCCESS, x, system.residual_norm(x, p), 0, 0, 1.0)

    hom = _Homotopy(system, path)
    t, h = 0.0, config.step_initial
    steps = rejects = streak = 0
    status = None
    while t < 1.0:
        if steps + rejects >= config.max_steps:
            status = PathStatus.MAX_STEPS
            break
        h = min(h, 1.0 - t)
        try:
            x_pred = hom.rk4(x, t, h)
            x_new, ok = hom.correct(x_pred, t + h, config)
        except SingularJacobianError:
            ok = False
        if ok and np.all(np.isfinite(x_new)):
            x = x_new
            t = 1.0 if h >= 1.0 - t else t + h
            steps += 1
            streak += 1
            if streak >= config.growth_after:
                h = min(1.0, h * config.step_growth)
                streak = 0
            if np.linalg.norm(x) > config.divergence_norm:
                status = PathStatus.DIVERGED
                break
        else:
            rejects += 1
            streak = 0
            h *= config.step_shrink
            if h < config.step_min:
                status = PathStatus.STEP_UNDERFLOW
                break

    p_end = path.params(min(t, 1.0))
    if status is not None:
        return PathResult(status, x, system.residual_norm(x, p_end), steps, rejects, t)
    try:
        x, res = refine(system, p_end, x, config.refine_tol, config.refine_iters)
    except SingularJacobianError:
        return PathResult(PathStatus.SINGULAR, x, system.residual_norm(x, p_end), steps, rejects, t)
    status = PathStatus.SUCCESS if res <= config.refine_tol else PathStatus.REFINE_FAILED
    return PathResult(status, x, res, steps, rejects, t)
