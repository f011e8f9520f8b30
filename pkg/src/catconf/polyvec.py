"""Dense complex forms in a fixed monomial order.

Monomials of degree ``d`` in ``x_0..x_n`` are ordered lexicographically
descending on their exponent tuples, so for ``n=2, d=2`` the order is
``x0^2, x0x1, x0x2, x1^2, x1x2, x2^2``.  All coefficient vectors in the
package use this order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class MonomialOrder:
    n: int
    d: int
    exps: tuple[tuple[int, ...], ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.exps)

    @property
    def list(self) -> tuple[tuple[int, ...], ...]:
        return self.exps

    def index(self, exponent: Sequence[int]) -> int:
        return _index_table(self.n, self.d)[tuple(exponent)]

    @property
    def array(self) -> np.ndarray:
        """Exponents as an integer array of shape (len, n+1)."""
        return _exp_array(self.n, self.d)

    @property
    def multinomials(self) -> np.ndarray:
        """Multinomial coefficients d!/(e_0!...e_n!) per monomial."""
        return _multinomials(self.n, self.d)


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> MonomialOrder:
    if n < 0 or d < 0:
        raise ValueError(f"need n >= 0 and d >= 0, got n={n}, d={d}")
    exps = tuple(
        sorted(
            (e for e in itertools.product(range(d + 1), repeat=n + 1) if sum(e) == d),
            reverse=True,
        )
    )
    assert len(exps) == comb(d + n, n)
    return MonomialOrder(n, d, exps)


@lru_cache(maxsize=None)
def _index_table(n: int, d: int) -> dict:
    return {e: i for i, e in enumerate(monomials(n, d).exps)}


@lru_cache(maxsize=None)
def _exp_array(n: int, d: int) -> np.ndarray:
    arr = np.array(monomials(n, d).exps, dtype=np.int64).reshape(-1, n + 1)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _multinomials(n: int, d: int) -> np.ndarray:
    w = np.array(
        [factorial(d) // np.prod([factorial(k) for k in e]) for e in monomials(n, d).exps],
        dtype=float,
    )
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class Poly:
    order: MonomialOrder
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (len(self.order),):
            raise ValueError(
                f"expected {len(self.order)} coefficients for degree {self.order.d}, got {c.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.order.n

    @property
    def degree(self) -> int:
        return self.order.d

    @classmethod
    def zero(cls, n: int, d: int) -> "Poly":
        return cls(monomials(n, d), np.zeros(len(monomials(n, d)), dtype=complex))

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff: complex = 1.0) -> "Poly":
        exponent = tuple(exponent)
        p = cls.zero(len(exponent) - 1, sum(exponent))
        c = p.coeffs.copy()
        c[p.order.index(exponent)] = coeff
        return cls(p.order, c)

    def __add__(self, other: "Poly") -> "Poly":
        if other.order != self.order:
            raise ValueError("cannot add forms of different shape")
        return Poly(self.order, self.coeffs + other.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "Poly":
        return Poly(self.order, self.coeffs * scalar)

    __rmul__ = __mul__

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))


@dataclass(frozen=True)
class PolyVector:
    n: int
    degrees: tuple[int, ...]
    forms: tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(a) for a in self.degrees))
        object.__setattr__(self, "forms", tuple(self.forms))
        if len(self.forms) < 1:
            raise ValueError("a polynomial vector needs at least one form")
        if len(self.forms) != len(self.degrees):
            raise ValueError("degrees and forms have different lengths")
        for a, f in zip(self.degrees, self.forms):
            if f.n != self.n or f.degree != a:
                raise ValueError(f"form of degree {f.degree} in {f.n + 1} variables, expected {a}, {self.n + 1}")

    @property
    def r(self) -> int:
        return len(self.forms)

    @property
    def N(self) -> int:
        return sum(comb(a + self.n, self.n) for a in self.degrees)

    def coefficients(self) -> np.ndarray:
        """All coefficients concatenated form by form."""
        return np.concatenate([f.coeffs for f in self.forms])

    @classmethod
    def from_coefficients(cls, n: int, degrees: Sequence[int], coeffs: np.ndarray) -> "PolyVector":
        coeffs = np.asarray(coeffs, dtype=complex)
        forms, pos = [], 0
        for a in degrees:
            m = len(monomials(n, a))
            forms.append(Poly(monomials(n, a), coeffs[pos:pos + m]))
            pos += m
        if pos != len(coeffs):
            raise ValueError(f"expected {pos} coefficients, got {len(coeffs)}")
        return cls(n, tuple(degrees), tuple(forms))


@dataclass(frozen=True)
class BiForm:
    """Form of bidegree (d_s, d_y) in (s, t) x (y0, y1, y2).

    ``matrix[i, j]`` is the coefficient of (i-th monomial in s,t) times
    (j-th monomial in y).
    """

    bidegree: tuple[int, int]
    matrix: np.ndarray

    def __post_init__(self):
        ds, dy = self.bidegree
        m = np.asarray(self.matrix, dtype=complex)
        shape = (len(monomials(1, ds)), len(monomials(2, dy)))
        if m.shape != shape:
            raise ValueError(f"bidegree {self.bidegree} needs shape {shape}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    def eval(self, st: Sequence[complex], y: Sequence[complex]) -> complex:
        ds, dy = self.bidegree
        return complex(veronese(ds, st) @ self.matrix @ veronese(dy, y))


def _check_point(p: Poly, point) -> np.ndarray:
    point = np.asarray(point, dtype=complex)
    if point.shape != (p.n + 1,):
        raise ValueError(f"point has length {point.shape}, form has {p.n + 1} variables")
    return point


def eval(p: Poly, point: Sequence[complex]) -> complex:  # noqa: A001
    point = _check_point(p, point)
    return complex(p.coeffs @ veronese(p.degree, point))


def derivative(p: Poly, var: int) -> Poly:
    if not 0 <= var <= p.n:
        raise ValueError(f"variable index {var} out of range for n={p.n}")
    if p.degree == 0:
        return Poly.zero(p.n, 0)
    target = monomials(p.n, p.degree - 1)
    out = np.zeros(len(target), dtype=complex)
    for c, e in zip(p.coeffs, p.order.exps):
        if e[var] == 0 or c == 0:
            continue
        lowered = list(e)
        lowered[var] -= 1
        out[target.index(lowered)] += e[var] * c
    return Poly(target, out)


def apply_operator(p: Poly, operator: Sequence[int]) -> Poly:
    """Apply the differential operator prod_v (d/dx_v)^operator[v]."""
    for var, times in enumerate(operator):
        for _ in range(times):
            p = derivative(p, var)
    return p


def _power_table(points: np.ndarray, d: int) -> np.ndarray:
    # table[..., v, e] = points[..., v] ** e, built by products so 0**0 == 1
    table = np.ones(points.shape + (d + 1,), dtype=complex)
    for e in range(1, d + 1):
        table[..., e] = table[..., e - 1] * points
    return table


def _gathered(pts: np.ndarray, d: int):
    n = pts.shape[-1] - 1
    E = _exp_array(n, d)
    table = _power_table(pts, d)
    cols = np.arange(n + 1)
    # factors[..., m, v] = pts[..., v] ** E[m, v]
    return E, table, table[..., cols, E]


def veronese(d: int, point) -> np.ndarray:
    """Unweighted degree-``d`` monomials of ``point`` (batched over leading axes)."""
    pts = np.asarray(point, dtype=complex)
    _, _, factors = _gathered(pts, d)
    return np.prod(factors, axis=-1)


def veronese_jacobian(d: int, point) -> np.ndarray:
    """Derivatives of ``veronese(d, point)``; shape (..., M, n+1)."""
    pts = np.asarray(point, dtype=complex)
    E, table, factors = _gathered(pts, d)
    cols = np.arange(pts.shape[-1])
    lowered = table[..., cols, np.maximum(E - 1, 0)] * E
    # product of the other factors via prefix/suffix products (no division by zero)
    ones = np.ones(factors.shape[:-1] + (1,), dtype=complex)
    prefix = np.cumprod(np.concatenate([ones, factors[..., :-1]], axis=-1), axis=-1)
    suffix = np.cumprod(np.concatenate([ones, factors[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return lowered * prefix * suffix


def linear_power_coeffs(nu, d: int) -> np.ndarray:
    """Coefficients of (x0 + nu_1 x1 + ... + nu_n xn)^d, batched over leading axes of ``nu``."""
    nu = np.asarray(nu, dtype=complex)
    n = nu.shape[-1]
    pts = np.concatenate([np.ones(nu.shape[:-1] + (1,), dtype=complex), nu], axis=-1)
    return _multinomials(n, d) * veronese(d, pts)


def linear_power_coeffs_jac(nu, d: int) -> np.ndarray:
    """Derivative of ``linear_power_coeffs`` with respect to nu; shape (..., M, n)."""
    nu = np.asarray(nu, dtype=complex)
    n = nu.shape[-1]
    pts = np.concatenate([np.ones(nu.shape[:-1] + (1,), dtype=complex), nu], axis=-1)
    return _multinomials(n, d)[:, None] * veronese_jacobian(d, pts)[..., 1:]


def waring_forward_eval(summands: Sequence[tuple], degrees: Sequence[int]) -> PolyVector:
    """Build f_j = sum_i lambda_i^j l_i^{a_j} with l_i = x0 + nu_i . (x1..xn)."""
    if not summands:
        raise ValueError("need at least one summand")
    nus = np.array([np.asarray(nu, dtype=complex) for nu, _ in summands])
    lams = np.array([np.asarray(lam, dtype=complex) for _, lam in summands])
    n = nus.shape[1]
    if lams.shape[1] != len(degrees):
        raise ValueError(f"each summand needs {len(degrees)} weights, got {lams.shape[1]}")
    forms = []
    for j, a in enumerate(degrees):
        coeffs = lams[:, j] @ linear_power_coeffs(nus, a)
        forms.append(Poly(monomials(n, a), coeffs))
    return PolyVector(n, tuple(degrees), tuple(forms))


def random_complex(rng: np.random.Generator, size, scale: float = 1.0) -> np.ndarray:
    """Complex Gaussian with independent real and imaginary parts."""
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def random_summands(rng: np.random.Generator, n: int, r: int, k: int) -> list[tuple[np.ndarray, np.ndarray]]:
    return [(random_complex(rng, n), random_complex(rng, r)) for _ in range(k)]
