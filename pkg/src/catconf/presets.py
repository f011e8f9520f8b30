"""Named instances used by the command line and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .polyvec import PolyVector, random_summands, waring_forward_eval
from .systems import (
    C2TWELVE,
    SEGRE6,
    ParameterizedSystem,
    build_reduced_quartic_system,
    build_sextic_rank9_system,
    build_slice_system,
    build_waring_system,
)


@dataclass(frozen=True)
class CountPreset:
    name: str
    build: Callable[[int], ParameterizedSystem]
    expected: int


COUNT_PRESETS: dict[str, CountPreset] = {
    p.name: p
    for p in [
        CountPreset("london", lambda seed: build_waring_system(2, 3, (3, 3, 3), 6, name="london"), 2),
        CountPreset("london-mixed", lambda seed: build_waring_system(2, 4, (3, 3, 3, 2), 6, name="london-mixed"), 2),
        CountPreset("quartics-full", lambda seed: build_waring_system(2, 4, (4, 4, 4, 4), 10, name="quartics-full"), 18),
        CountPreset("quartics-reduced", lambda seed: build_reduced_quartic_system(), 18),
        CountPreset("sextic9", lambda seed: build_sextic_rank9_system(seed), 2),
        CountPreset(SEGRE6, lambda seed: build_slice_system(SEGRE6, seed), 6),
        CountPreset(C2TWELVE, lambda seed: build_slice_system(C2TWELVE, seed), 12),
    ]
}


@dataclass(frozen=True)
class RankPreset:
    name: str
    r: int
    degree: int
    k: int
    h: int

    @property
    def expected_rank(self) -> int:
        return self.k

    def instance(self, seed: int) -> tuple[PolyVector, list]:
        """Random k-summand vector (seeded) with its generating decomposition."""
        rng = np.random.default_rng(seed)
        summands = random_summands(rng, 2, self.r, self.k)
        return waring_forward_eval(summands, (self.degree,) * self.r), summands


RANK_PRESETS: dict[str, RankPreset] = {
    p.name: p
    for p in [
        RankPreset("cubics333", 3, 3, 6, 2),
        RankPreset("quartics4444", 4, 4, 10, 3),
        RankPreset("sextic-rank9", 1, 6, 9, 3),
        RankPreset("octic-rank14", 1, 8, 14, 4),
    ]
}


def build_count_system(name: str, seed: int = 0) -> ParameterizedSystem:
    try:
        preset = COUNT_PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(COUNT_PRESETS)}") from None
    return preset.build(seed)
