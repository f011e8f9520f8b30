"""Catalecticant matrices of polynomial vectors and the image-membership test."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from .polyvec import PolyVector, apply_operator, linear_power_coeffs, monomials

RANK_TOL = 1e-8


@dataclass(frozen=True)
class CatalecticantMatrix:
    h: int
    matrix: np.ndarray
    blocks: tuple[np.ndarray, ...]
    singular_values: np.ndarray
    rank: int
    gap: float
    image_basis: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True)
class Rank1Point:
    """Point l^v (x) (lambda^1..lambda^r) in the catalecticant target space.

    For an operator order ``h`` against forms of degree ``d`` the j-th chunk
    is lambda^j times the coefficient vector of l^(d-h); when d-h == 1 this
    is lambda^j (1, nu^1, nu^2).  Mixed degrees weight chunk j by
    a_j!/(a_j-h)! relative to the first form, the factor the derivatives carry.
    """

    nu: np.ndarray
    lam: np.ndarray
    vector: np.ndarray

    @classmethod
    def from_summand(cls, nu, lam, degrees: Sequence[int], h: int) -> "Rank1Point":
        nu = np.asarray(nu, dtype=complex)
        lam = np.asarray(lam, dtype=complex)
        w0 = _falling(degrees[0], h)
        chunks = [
            (_falling(a, h) / w0) * lam[j] * linear_power_coeffs(nu, a - h)
            for j, a in enumerate(degrees)
        ]
        return cls(nu, lam, np.concatenate(chunks))


def _falling(a: int, h: int) -> float:
    return float(factorial(a) // factorial(a - h))


def numerical_rank(matrix, tol: float = RANK_TOL) -> int:
    sv = np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)
    return _rank_from_sv(sv, tol)


def _rank_from_sv(sv: np.ndarray, tol: float) -> int:
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv / sv[0] >= tol))


def rank_gap(sv: np.ndarray, rank: int) -> float:
    """sigma_{rank+1} / sigma_rank; 0 when the matrix has full rank."""
    if rank == 0:
        return 1.0
    if rank >= sv.size:
        return 0.0
    return float(sv[rank] / sv[rank - 1])


def _block(form, h: int) -> np.ndarray:
    ops = monomials(form.n, h).exps
    return np.column_stack([apply_operator(form, op).coeffs for op in ops])


def _assemble(f: PolyVector, h: int, tol: float) -> CatalecticantMatrix:
    blocks = tuple(_block(form, h) for form in f.forms)
    M = np.vstack(blocks)
    U, sv, _ = np.linalg.svd(M, full_matrices=False)
    rank = _rank_from_sv(sv, tol)
    return CatalecticantMatrix(
        h=h,
        matrix=M,
        blocks=blocks,
        singular_values=sv,
        rank=rank,
        gap=rank_gap(sv, rank),
        image_basis=U[:, :rank],
    )


def build_catalecticant(f: PolyVector, h: int, tol: float = RANK_TOL) -> CatalecticantMatrix:
    if len(set(f.degrees)) != 1:
        raise ValueError(
            f"mixed degrees {f.degrees}; use build_stacked_catalecticant for mixed vectors"
        )
    d = f.degrees[0]
    if not 1 <= h <= d - 1:
        raise ValueError(f"derivative order must satisfy 1 <= h <= {d - 1}, got {h}")
    return _assemble(f, h, tol)


def build_stacked_catalecticant(f: PolyVector, h: int, tol: float = RANK_TOL) -> CatalecticantMatrix:
    """Contraction by order-``h`` operators of forms with possibly different degrees.

    Forms of degree exactly ``h`` contribute a single row of constants.
    """
    if h < 1 or min(f.degrees) < h:
        raise ValueError(f"all degrees must be >= h={h}, got {f.degrees}")
    return _assemble(f, h, tol)


def membership_residual(point, basis: np.ndarray) -> float:
    """Distance from the unit-normalised ``point`` to span(basis)."""
    v = point.vector if isinstance(point, Rank1Point) else np.asarray(point, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("zero point vector")
    v = v / norm
    return float(np.linalg.norm(v - basis @ (basis.conj().T @ v)))


def generating_memberships(cat: CatalecticantMatrix, summands, degrees: Sequence[int]) -> list[float]:
    return [
        membership_residual(Rank1Point.from_summand(nu, lam, degrees, cat.h), cat.image_basis)
        for nu, lam in summands
    ]


def octic_hyperplane_check(f: PolyVector, summands, tol: float = RANK_TOL) -> tuple[int, list[float]]:
    """Rank of the order-4 catalecticant of a ternary octic and the membership
    residuals of nu_4 of its generating linear forms."""
    if f.r != 1 or f.degrees != (8,):
        raise ValueError("expected a single ternary octic")
    cat = build_catalecticant(f, 4, tol)
    return cat.rank, generating_memberships(cat, summands, f.degrees)


def rank_report(cat: CatalecticantMatrix, memberships: Sequence[float] = ()) -> dict:
    return {
        "shape": list(cat.shape),
        "rank": cat.rank,
        "sigma": [float(s) for s in cat.singular_values],
        "gap": cat.gap,
        "memberships": [float(m) for m in memberships],
    }
