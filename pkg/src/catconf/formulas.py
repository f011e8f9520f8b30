"""Integer formulas: perfect cases, generic ranks, defectivity."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence

INT64_MAX = 2**63 - 1


def _checked(value: int) -> int:
    if abs(value) > INT64_MAX:
        raise OverflowError(f"{value} does not fit in 64 bits")
    return value


def _binom(a: int, b: int) -> int:
    return _checked(comb(a, b))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class CaseSpec:
    n: int
    r: int
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        if len(self.degrees) != self.r:
            raise ValueError(f"r={self.r} but {len(self.degrees)} degrees given")

    @property
    def N(self) -> int:
        return _checked(sum(_binom(a + self.n, self.n) for a in self.degrees))

    @property
    def dimX(self) -> int:
        return self.r + self.n - 1


def perfect_case(spec: CaseSpec) -> Optional[int]:
    q, rem = divmod(spec.N, spec.dimX + 1)
    return q if rem == 0 else None


def generic_rank_uniform(n: int, r: int, a: int) -> int:
    return _ceil_div(_checked(r * _binom(a + n, n)), n + r)


def generic_rank_mixed(n: int, r: int, a1: int, s: int, a2: int) -> int:
    total = _checked(r * _binom(a1 + n, n) + s * _binom(a2 + n, n))
    return _ceil_div(total, n + r + s)


def defectivity_check(n: int, r: int, a1: int, s: int, a2: int) -> tuple[int, int, bool]:
    """Generic rank k of r forms of degree a1, k' after appending s forms of
    degree a2, and whether k >= k' flags the mixed variety as defective."""
    if not a2 < a1:
        raise ValueError(f"need a2 < a1, got a1={a1}, a2={a2}")
    k = generic_rank_uniform(n, r, a1)
    kp = generic_rank_mixed(n, r, a1, s, a2)
    return k, kp, k >= kp


def square_count(n: int, degrees: Sequence[int], k: int) -> tuple[int, int]:
    """(unknowns, equations) for a k-summand simultaneous decomposition."""
    r = len(degrees)
    return k * (n + r), CaseSpec(n, r, tuple(degrees)).N
