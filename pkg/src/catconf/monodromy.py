"""Triangle-loop monodromy over a fixed base parameter.

Known solutions are carried around loops base -> p1 -> p2 -> base; endpoints
that are new up to reordering of summands become new classes.  The search
stops once ``stable_loops`` consecutive loops add nothing.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .systems import PUSHFORWARD, ParameterizedSystem, StartPair
from .tracker import PathResult, SingularJacobianError, TrackerConfig, refine, track

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonodromyConfig:
    stable_loops: int = 8
    max_loops: int = 100
    dedup_tol: float = 1e-6
    residual_tol: float = 1e-8
    reality_tol: float = 1e-8
    regularity_tol: float = 1e-6
    failure_budget: float = 0.2
    max_redraws: int = 5
    threads: int = 1
    tracker: TrackerConfig = field(default_factory=TrackerConfig)


@dataclass
class SolutionClass:
    x: np.ndarray
    summands: np.ndarray
    residual: float
    is_real: bool
    sigma_min: float
    valid: bool = True

    @property
    def spurious(self) -> bool:
        return not self.valid

    @property
    def canonical_key(self) -> tuple:
        """Summands rounded and sorted; a display key, equivalence is `dedup`."""
        rows = [tuple(np.round(np.concatenate([s.real, s.imag]), 8)) for s in self.summands]
        return tuple(sorted(rows))

    def to_json(self) -> dict:
        return {
            "summands": [[[float(z.real), float(z.imag)] for z in s] for s in _sorted_summands(self.summands)],
            "residual": self.residual,
            "is_real": self.is_real,
        }


def _sorted_summands(summands: np.ndarray) -> np.ndarray:
    keys = [tuple(np.concatenate([s.real, s.imag])) for s in summands]
    return summands[sorted(range(len(keys)), key=keys.__getitem__)]


def summand_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise max-norm distances between summand rows, relative to their size."""
    diff = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
    scale = 1.0 + np.maximum(np.max(np.abs(a), axis=1)[:, None], np.max(np.abs(b), axis=1)[None, :])
    return diff / scale


def dedup(a: np.ndarray, b: np.ndarray, tol: float = 1e-6) -> bool:
    """True iff the summand lists ``a`` and ``b`` agree up to reordering."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    if a.shape != b.shape:
        return False
    D = summand_distance_matrix(a, b)
    rows, cols = linear_sum_assignment(D)
    return bool(np.all(D[rows, cols] <= tol))


def scaled_sigma_min(J: np.ndarray, x=None, p=None) -> float:
    """Inverse condition of J under the better of two diagonal scalings.

    Equilibrated: unit-norm rows then columns, sigma_min / sigma_max.
    Pipeline units (needs x and p): columns times max(1, |x_i|), divided by
    max(1, |p|_inf), i.e. scaled residual against relative coordinate changes.
    A singular J scores 0 under both.
    """
    A = J / np.maximum(np.linalg.norm(J, axis=1, keepdims=True), 1e-300)
    A = A / np.maximum(np.linalg.norm(A, axis=0, keepdims=True), 1e-300)
    sv = np.linalg.svd(A, compute_uv=False)
    best = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
    if x is not None and p is not None:
        B = J * np.maximum(1.0, np.abs(x))[None, :] / max(1.0, float(np.max(np.abs(p))))
        best = max(best, float(np.linalg.svd(B, compute_uv=False)[-1]))
    return best


class SolutionClassSet:
    def __init__(self, system: ParameterizedSystem, base_p: np.ndarray, config: MonodromyConfig):
        self.system = system
        self.base_p = base_p
        self.config = config
        self.classes: list[SolutionClass] = []

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def classify(self, x: np.ndarray) -> Optional[SolutionClass]:
        """Check ``x`` solves the tracked system at the base and is regular.

        Returns None otherwise.  Classes failing the full (unsquared)
        residual are kept as spurious: they still carry monodromy.
        """
        if not self.system.residual_norm(x, self.base_p) <= self.config.residual_tol:
            return None
        sigma_min = scaled_sigma_min(self.system.jacobian(x, self.base_p), x, self.base_p)
        if sigma_min < self.config.regularity_tol:
            return None
        res = self.system.residual_norm(x, self.base_p, full=True)
        is_real = bool(np.all(np.abs(x.imag) <= self.config.reality_tol))
        valid = res <= self.config.residual_tol
        return SolutionClass(x.copy(), self.system.summands(x), res, is_real, sigma_min, valid)

    @property
    def valid(self) -> list[SolutionClass]:
        return [c for c in self.classes if c.valid]

    def find(self, summands: np.ndarray) -> Optional[int]:
        for i, c in enumerate(self.classes):
            if dedup(c.summands, summands, self.config.dedup_tol):
                return i
        return None

    def add(self, x: np.ndarray) -> str:
        """Merge ``x``; returns 'new', 'known' or 'invalid'."""
        cls = self.classify(x)
        if cls is None:
            return "invalid"
        if self.find(cls.summands) is not None:
            return "known"
        self.classes.append(cls)
        return "new"


@dataclass
class MonodromyState:
    system: ParameterizedSystem
    base: np.ndarray
    base_p: np.ndarray
    classes: SolutionClassSet
    seed: int
    loops_run: int = 0
    loops_since_new: int = 0
    stabilized: bool = False
    paths_tracked: int = 0
    path_failures: int = 0
    degenerate_loops: int = 0
    history: list = field(default_factory=list)

    @property
    def count(self) -> int:
        """Classes surviving the full-residual filter."""
        return len(self.classes.valid)

    @property
    def spurious(self) -> int:
        return len(self.classes) - self.count

    @property
    def failure_rate(self) -> float:
        return self.path_failures / self.paths_tracked if self.paths_tracked else 0.0


def loop_rng(seed: int, loop_index: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, loop_index, attempt])


def draw_loop_points(system, base, base_p, rng) -> tuple[np.ndarray, np.ndarray]:
    if system.path_strategy == PUSHFORWARD:
        return system.random_latent(rng), system.random_latent(rng)
    return system.random_parameters(rng, base_p), system.random_parameters(rng, base_p)


def _around_loop(system, points, x, config: TrackerConfig) -> tuple[Optional[np.ndarray], int]:
    """Track one solution around the closed polygon ``points``; (endpoint, segments tracked)."""
    for i, (a, b) in enumerate(zip(points[:-1], points[1:])):
        res: PathResult = track(system, a, b, x, config)
        if not res.ok:
            log.debug("segment %d failed: %s after %d steps", i, res.status.value, res.steps_taken)
            return None, i + 1
        x = res.endpoint
    return x, len(points) - 1


def triangle_loop(system, state: MonodromyState, config: MonodromyConfig,
                  aux: Optional[tuple] = None) -> MonodromyState:
    loop_index = state.loops_run
    reps = [c.x for c in state.classes]
    for attempt in range(config.max_redraws + 1):
        if aux is None:
            p1, p2 = draw_loop_points(system, state.base, state.base_p, loop_rng(state.seed, loop_index, attempt))
        else:
            p1, p2 = aux
        points = [state.base, p1, p2, state.base]

        def run_one(x):
            return _around_loop(system, points, x, config.tracker)

        if config.threads > 1 and len(reps) > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                outcomes = list(pool.map(run_one, reps))
        else:
            outcomes = [run_one(x) for x in reps]

        failures = sum(1 for end, _ in outcomes if end is None)
        state.paths_tracked += len(outcomes)
        state.path_failures += failures
        if failures < len(outcomes) or aux is not None:
            break
        state.degenerate_loops += 1
        log.warning("loop %d: every path failed, redrawing (attempt %d)", loop_index, attempt + 1)

    added = 0
    # merge in representative order so the result does not depend on scheduling
    for end, _ in outcomes:
        if end is None:
            continue
        try:
            end, _ = refine(system, state.base_p, end, config.tracker.refine_tol, config.tracker.refine_iters)
        except SingularJacobianError:
            state.path_failures += 1
            continue
        verdict = state.classes.add(end)
        if verdict == "new":
            added += 1
        elif verdict == "invalid":
            state.path_failures += 1

    state.loops_run += 1
    state.loops_since_new = 0 if added else state.loops_since_new + 1
    state.stabilized = state.loops_since_new >= config.stable_loops
    state.history.append(len(state.classes))
    log.info("loop %d: %d classes (+%d), %d quiet", loop_index, len(state.classes), added, state.loops_since_new)
    return state


class InvalidStartError(ValueError):
    pass


def initial_state(system, start: StartPair, config: MonodromyConfig, seed: int) -> MonodromyState:
    res = system.residual_norm(start.x, start.p, full=True)
    if not res <= 1e-12:
        raise InvalidStartError(f"start pair residual {res:.3e} exceeds 1e-12")
    classes = SolutionClassSet(system, start.p, config)
    if classes.add(start.x) != "new" or not classes.classes[0].valid:
        raise InvalidStartError("start solution failed regularity or residual checks")
    return MonodromyState(system, start.base, start.p, classes, seed)


def run(system, start: StartPair, config: MonodromyConfig = MonodromyConfig(), seed: int = 0) -> MonodromyState:
    state = initial_state(system, start, config, seed)
    while not state.stabilized and state.loops_run < config.max_loops:
        triangle_loop(system, state, config)
    if state.failure_rate > config.failure_budget:
        log.warning("path failure rate %.1f%% exceeds budget %.0f%%",
                    100 * state.failure_rate, 100 * config.failure_budget)
    return state


def solution_set_json(state: MonodromyState, preset: str) -> dict:
    out = {
        "preset": preset,
        "seed": state.seed,
        "base_p": [[float(z.real), float(z.imag)] for z in state.base_p],
        "classes": [c.to_json() for c in state.classes.valid],
        "spurious_filtered": state.spurious,
        "loops_run": state.loops_run,
        "stabilized": state.stabilized,
        "path_failures": state.path_failures,
    }
    if state.system.path_strategy == PUSHFORWARD:
        out["base_latent"] = [[float(z.real), float(z.imag)] for z in state.base]
    return out
