"""Parameterised square polynomial systems whose isolated solutions are decompositions.

Every system exposes ``residual(x, p)``, ``jacobian(x, p)`` (with respect to
``x``) and ``parameter_dt(x, p, dp)``, the derivative of the residual along a
parameter direction ``dp``.  Systems also know how to manufacture a start pair:
a random solution ``x`` together with parameters ``p`` it solves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np

from .polyvec import (
    BiForm,
    linear_power_coeffs,
    linear_power_coeffs_jac,
    monomials,
    random_complex,
    veronese,
    veronese_jacobian,
)

LINEAR = "linear"
PUSHFORWARD = "pushforward"

START_TOL = 1e-12

# Published start point of the reduced quartic system, (re, im) pairs for v_0..v_39.
PUBLISHED_START_POINT = np.array([complex(a, b) for a, b in [
    (3.803150504548735e-1, 1.080968803617349e-1),
    (4.012914786260265e-2, 1.194906105430308e-2),
    (-5.791791173087690e-1, 7.036742613968909e-1),
    (-3.976968438023937e-1, 9.044873244848521e-1),
    (2.231698943133415e-1, 6.687608922343052e-1),
    (6.002906583490685e-1, 2.206993065311951e-1),
    (3.867065923659511e-1, 1.345756657407951e-1),
    (1.526038777608076e-1, -6.566938139632470e-1),
    (-1.736311597636939e-1, -7.609350872905872e-1),
    (4.316168188831709e-1, -4.213795287363188e-1),
    (-1.741310170829991e-1, 2.308979289387978e-1),
    (-1.859590880062348e-1, 2.841353874294199e-1),
    (-1.169608247513672e-1, 8.765209704988050e-1),
    (5.407734749067091e-1, -3.124118196630669e-1),
    (1.527995379711511e-1, 6.089233207073497e-1),
    (3.204152865278664e-1, -5.904671666326385e-1),
    (-1.330737937092930e-1, -6.578838258756913e-1),
    (-7.385080142922554e-1, 5.831003376892393e-1),
    (6.699288861915320e-1, -5.533657523766588e-1),
    (3.902845736728862e-1, -1.485132206413023e-1),
    (2.065574523959247e-1, -6.446211342534475e-1),
    (-5.935341284909806e-1, 9.380573668092805e-1),
    (6.398816151374838e-1, 7.796882650167238e-1),
    (-5.451582606670785e-1, 7.278281716630082e-1),
    (-8.648295254072200e-1, 9.603906925323353e-1),
    (1.185927730430883e-1, 9.581113986558572e-1),
    (-1.272156730720730e-1, -3.826018264098715e-1),
    (-6.204082514618516e-1, 1.303932410632590e-1),
    (-4.055191686841270e-1, -1.061742318012200e-1),
    (5.497821295556304e-1, -9.390776649698522e-1),
    (-9.573483983309962e-1, 6.119729292434732e-1),
    (-3.625771545885574e-1, 5.248770839543854e-1),
    (-1.256230679554358e-1, -1.784554662383838e-1),
    (-2.906342421922776e-1, -5.154050022761094e-1),
    (-2.436126820291677e-1, -3.569908300218846e-1),
    (-8.981673995870921e-1, 1.329775006009424e-1),
    (-1.778113408966572e-1, 1.553732129113020e-1),
    (2.014979024950735e-1, 2.767539435584817e-1),
    (-7.897330203466324e-1, 9.827999531425403e-1),
    (-3.766244866562784e-1, 1.708209472557658e-1),
]])


class ParameterizedSystem:
    """Base class; subclasses fill in the residual and its derivatives."""

    name = "system"
    path_strategy = LINEAR
    x_dim: int
    p_dim: int
    summand_size: int

    def residual(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, x: np.ndarray, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def parameter_dt(self, x: np.ndarray, p: np.ndarray, dp: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # The full system equals the square one except for randomised squarings.
    def full_residual(self, x, p):
        return self.residual(x, p)

    def full_jacobian(self, x, p):
        return self.jacobian(x, p)

    def residual_norm(self, x, p, full: bool = False) -> float:
        """Max-norm of the residual relative to max(1, |p|_inf)."""
        F = self.full_residual(x, p) if full else self.residual(x, p)
        return float(np.max(np.abs(F)) / max(1.0, float(np.max(np.abs(p)))))

    def summands(self, x) -> np.ndarray:
        return np.asarray(x, dtype=complex).reshape(-1, self.summand_size)

    def sample_latent(self, rng: np.random.Generator) -> np.ndarray:
        return random_complex(rng, self.x_dim)

    def start_parameters(self, x, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def random_parameters(self, rng: np.random.Generator, base_p: np.ndarray) -> np.ndarray:
        scale = float(np.sqrt(np.mean(np.abs(base_p) ** 2))) or 1.0
        return random_complex(rng, self.p_dim, scale / np.sqrt(2.0))

    def path(self, start, end) -> "LinearPath":
        return LinearPath(np.asarray(start, dtype=complex), np.asarray(end, dtype=complex))

    def describe(self) -> dict:
        return {"name": self.name, "x_dim": self.x_dim, "p_dim": self.p_dim, "strategy": self.path_strategy}


@dataclass(frozen=True)
class LinearPath:
    start: np.ndarray
    end: np.ndarray

    def params(self, t: float) -> np.ndarray:
        return (1.0 - t) * self.start + t * self.end

    def dparams(self, t: float) -> np.ndarray:
        return self.end - self.start

    @property
    def is_constant(self) -> bool:
        return bool(np.array_equal(self.start, self.end))


@dataclass(frozen=True)
class PushforwardPath:
    """Segment in latent space carried onto the parameter locus by a forward map."""

    system: "ForwardMapSystem"
    start: np.ndarray
    end: np.ndarray

    def latent(self, t: float) -> np.ndarray:
        return (1.0 - t) * self.start + t * self.end

    def params(self, t: float) -> np.ndarray:
        return self.system.forward(self.latent(t))

    def dparams(self, t: float) -> np.ndarray:
        return self.system.forward_jacobian(self.latent(t)) @ (self.end - self.start)

    @property
    def is_constant(self) -> bool:
        return bool(np.array_equal(self.start, self.end))


class ForwardMapSystem(ParameterizedSystem):
    """F(x; p) = forward(x) - p."""

    def forward(self, x) -> np.ndarray:
        raise NotImplementedError

    def forward_jacobian(self, x) -> np.ndarray:
        raise NotImplementedError

    def residual(self, x, p):
        return self.forward(x) - p

    def jacobian(self, x, p):
        return self.forward_jacobian(x)

    def parameter_dt(self, x, p, dp):
        return -np.asarray(dp, dtype=complex)

    def start_parameters(self, x, rng=None):
        return self.forward(x)

    def random_parameters(self, rng, base_p):
        # forward images of random latents: generic points at the natural scale
        return self.forward(self.sample_latent(rng))


class WaringSystem(ForwardMapSystem):
    """k-summand simultaneous decomposition of forms of the given degrees.

    Unknowns per summand are (nu^1..nu^n, lambda^1..lambda^r), summands
    concatenated; parameters are the coefficients of f form by form.
    """

    def __init__(self, n: int, degrees: Sequence[int], k: int, name: str = "waring"):
        self.n = n
        self.degrees = tuple(int(a) for a in degrees)
        self.r = len(self.degrees)
        self.k = k
        self.name = name
        self.summand_size = n + self.r
        self.x_dim = k * self.summand_size
        self.p_dim = sum(comb(a + n, n) for a in self.degrees)
        self._sizes = [comb(a + n, n) for a in self.degrees]

    def split(self, x):
        s = self.summands(x)
        return s[:, : self.n], s[:, self.n:]

    def forward(self, x):
        nus, lams = self.split(x)
        powers = {a: linear_power_coeffs(nus, a) for a in set(self.degrees)}
        return np.concatenate([lams[:, j] @ powers[a] for j, a in enumerate(self.degrees)])

    def forward_jacobian(self, x):
        nus, lams = self.split(x)
        n, r, k = self.n, self.r, self.k
        rows = []
        cache: dict = {}
        for j, a in enumerate(self.degrees):
            if a not in cache:
                cache[a] = linear_power_coeffs(nus, a), linear_power_coeffs_jac(nus, a)
            coeffs, dcoeffs = cache[a]                    # (k, M), (k, M, n)
            block = np.zeros((coeffs.shape[1], k, n + r), dtype=complex)
            block[:, :, :n] = (lams[:, j, None, None] * dcoeffs).transpose(1, 0, 2)
            block[:, :, n + j] = coeffs.T
            rows.append(block.reshape(coeffs.shape[1], k * (n + r)))
        return np.vstack(rows)

    def decomposition(self, x) -> list[tuple[np.ndarray, np.ndarray]]:
        nus, lams = self.split(x)
        return [(nus[i].copy(), lams[i].copy()) for i in range(self.k)]


def build_waring_system(n: int, r: int, degrees: Sequence[int], k: int, name: str = "waring") -> WaringSystem:
    degrees = tuple(degrees)
    if len(degrees) != r:
        raise ValueError(f"r={r} but {len(degrees)} degrees given")
    unknowns = k * (n + r)
    equations = sum(comb(a + n, n) for a in degrees)
    if unknowns != equations:
        raise ValueError(
            f"not square: k*(n+r) = {k}*({n}+{r}) = {unknowns} unknowns "
            f"vs sum binom(a_j+n, n) = {equations} equations"
        )
    return WaringSystem(n, degrees, k, name=name)


class ReducedQuarticSystem(ForwardMapSystem):
    """Ten summands g_i h_i^5 of bidegree (1, 5) at the 40 kept coefficient positions.

    Summand i uses (v_{4i}, v_{4i+1}, v_{4i+2}, v_{4i+3}) with
    h = y0 + v_{4i} y1 + v_{4i+1} y2 and g = v_{4i+2} s + v_{4i+3} t.
    Positions (s, y2^5) and (t, y1^5) of the 2 x 21 matrix are dropped.
    """

    name = "quartics-reduced"
    summand_size = 4
    x_dim = 40
    p_dim = 40
    k = 10
    dropped = ((0, 20), (1, 15))

    def __init__(self):
        mask = np.ones((2, 21), dtype=bool)
        for row, col in self.dropped:
            mask[row, col] = False
        self.mask = mask
        assert monomials(2, 5).exps[15] == (0, 5, 0) and monomials(2, 5).exps[20] == (0, 0, 5)

    def _parts(self, x):
        s = self.summands(x)
        pts = np.concatenate([np.ones((self.k, 1), dtype=complex), s[:, :2]], axis=1)
        return s, pts

    def full_matrix(self, x) -> np.ndarray:
        s, pts = self._parts(x)
        return s[:, 2:].T @ veronese(5, pts)

    def biform(self, x) -> BiForm:
        return BiForm((1, 5), self.full_matrix(x))

    def forward(self, x):
        return self.full_matrix(x)[self.mask]

    def forward_jacobian(self, x):
        s, pts = self._parts(x)
        V = veronese(5, pts)                        # (10, 21)
        dV = veronese_jacobian(5, pts)[..., 1:]     # (10, 21, 2)
        J = np.zeros((2, 21, self.k, 4), dtype=complex)
        for row in range(2):
            J[row, :, :, 0:2] = (s[:, 2 + row, None, None] * dV).transpose(1, 0, 2)
            J[row, :, :, 2 + row] = V.T
        return J[self.mask].reshape(40, 40)

    @staticmethod
    def parameters_to_matrix(p) -> np.ndarray:
        """Lay the 40 parameters into the 2 x 21 matrix with zeros at the dropped slots."""
        p = np.asarray(p, dtype=complex)
        out = np.zeros((2, 21), dtype=complex)
        out[0, :20] = p[:20]
        out[1, :15] = p[20:35]
        out[1, 16:] = p[35:40]
        return out


def build_reduced_quartic_system() -> ReducedQuarticSystem:
    return ReducedQuarticSystem()


class RandomizedSquareSystem(ForwardMapSystem):
    """R (forward(x) - p) for an overdetermined forward map.

    With the linear strategy parameters roam the whole space, where the
    squared system also has spurious solutions forward(x) = p + c ker(R);
    only solutions passing ``full_residual`` count.  With the pushforward
    strategy segments live in latent space and parameters stay on the image.
    """

    def __init__(self, inner: ForwardMapSystem, R: np.ndarray, name: str, strategy: str = LINEAR):
        self.inner = inner
        self.path_strategy = strategy
        self.R = np.asarray(R, dtype=complex)
        self.name = name
        self.x_dim = inner.x_dim
        self.p_dim = inner.p_dim
        self.summand_size = inner.summand_size
        if self.R.shape != (self.x_dim, self.p_dim):
            raise ValueError(f"R must be {self.x_dim} x {self.p_dim}, got {self.R.shape}")

    def forward(self, x):
        return self.inner.forward(x)

    def forward_jacobian(self, x):
        return self.inner.forward_jacobian(x)

    def residual(self, x, p):
        return self.R @ (self.inner.forward(x) - p)

    def jacobian(self, x, p):
        return self.R @ self.inner.forward_jacobian(x)

    def parameter_dt(self, x, p, dp):
        return -(self.R @ dp)

    def full_residual(self, x, p):
        return self.inner.forward(x) - p

    def full_jacobian(self, x, p):
        return self.inner.forward_jacobian(x)

    def random_latent(self, rng):
        return random_complex(rng, self.x_dim)

    def path(self, start, end):
        if self.path_strategy == PUSHFORWARD:
            return PushforwardPath(self, np.asarray(start, dtype=complex), np.asarray(end, dtype=complex))
        return super().path(start, end)


def build_sextic_rank9_system(seed: int = 0, strategy: str = LINEAR) -> RandomizedSquareSystem:
    inner = WaringSystem(2, (6,), 9, name="sextic9-full")
    rng = np.random.default_rng([seed, 9028])
    R = random_complex(rng, (27, 28), 1.0 / np.sqrt(2 * 28))
    return RandomizedSquareSystem(inner, R, name="sextic9", strategy=strategy)


SEGRE6 = "segre-slice-6"
C2TWELVE = "c2-slice-12"
_SLICE_FORMS = {
    SEGRE6: ((1, 1),) * 4,
    C2TWELVE: ((1, 1),) * 3 + ((3, 1),),
}


class SliceSystem(ParameterizedSystem):
    """Forms of bidegree (da, db) on P^2 x P^2 in the chart a0 = b0 = 1.

    Unknowns (a1, a2, b1, b2); parameters are the coefficients of every slice
    form, laid out as (monomials of a) x (monomials of b), row-major.
    """

    summand_size = 4
    x_dim = 4

    def __init__(self, preset: str):
        if preset not in _SLICE_FORMS:
            raise ValueError(f"unknown slice preset {preset!r}")
        self.name = preset
        self.forms = _SLICE_FORMS[preset]
        self.sizes = [comb(da + 2, 2) * comb(db + 2, 2) for da, db in self.forms]
        self.offsets = np.cumsum([0] + self.sizes)
        self.p_dim = int(self.offsets[-1])

    def _ab(self, x):
        x = np.asarray(x, dtype=complex)
        return np.array([1.0, x[0], x[1]], dtype=complex), np.array([1.0, x[2], x[3]], dtype=complex)

    def _basis(self, x, da, db):
        a, b = self._ab(x)
        return np.kron(veronese(da, a), veronese(db, b))

    def _basis_jac(self, x, da, db):
        a, b = self._ab(x)
        Va, Vb = veronese(da, a), veronese(db, b)
        dVa, dVb = veronese_jacobian(da, a)[:, 1:], veronese_jacobian(db, b)[:, 1:]
        return np.hstack([np.kron(dVa, Vb[:, None]), np.kron(Va[:, None], dVb)])

    def _coeff_blocks(self, p):
        return [p[self.offsets[i]:self.offsets[i + 1]] for i in range(len(self.forms))]

    def residual(self, x, p):
        return np.array(
            [c @ self._basis(x, da, db) for c, (da, db) in zip(self._coeff_blocks(p), self.forms)]
        )

    def jacobian(self, x, p):
        return np.vstack(
            [c @ self._basis_jac(x, da, db) for c, (da, db) in zip(self._coeff_blocks(p), self.forms)]
        )

    def parameter_dt(self, x, p, dp):
        return self.residual(x, dp)

    def start_parameters(self, x, rng):
        p = random_complex(rng, self.p_dim, 1.0 / np.sqrt(2.0))
        # index 0 of every block is the a0^da b0^db coefficient, equal to 1 in the chart
        p[self.offsets[:-1]] -= self.residual(x, p)
        return p

    def random_parameters(self, rng, base_p):
        return random_complex(rng, self.p_dim, 1.0 / np.sqrt(2.0))


def build_slice_system(preset: str, seed: int = 0) -> SliceSystem:
    # seed is accepted for interface symmetry; the structure is seed-free
    return SliceSystem(preset)


def bezout_slice_count(preset: str) -> int:
    """Multihomogeneous Bezout number on P^2 x P^2: coefficient of A^2 B^2 in prod (da A + db B)."""
    poly = {(0, 0): 1}
    for da, db in _SLICE_FORMS[preset]:
        nxt: dict = {}
        for (i, j), c in poly.items():
            nxt[(i + 1, j)] = nxt.get((i + 1, j), 0) + c * da
            nxt[(i, j + 1)] = nxt.get((i, j + 1), 0) + c * db
        poly = nxt
    return poly.get((2, 2), 0)


@dataclass(frozen=True)
class StartPair:
    p: np.ndarray
    x: np.ndarray
    provenance: str
    latent: Optional[np.ndarray] = field(default=None)

    @property
    def base(self) -> np.ndarray:
        """Point the monodromy loops are anchored at: latent for pushforward systems."""
        return self.p if self.latent is None else self.latent


class StartPairError(ValueError):
    pass


def make_start_pair(system: ParameterizedSystem, seed: Optional[int] = None, published: bool = False) -> StartPair:
    if published:
        if not isinstance(system, ReducedQuarticSystem):
            raise StartPairError("the published start point exists only for the reduced quartic system")
        x = PUBLISHED_START_POINT.copy()
        p = system.forward(x)
        pair = StartPair(p, x, "published")
    else:
        rng = np.random.default_rng(seed)
        x = system.sample_latent(rng)
        p = system.start_parameters(x, rng)
        latent = x.copy() if system.path_strategy == PUSHFORWARD else None
        pair = StartPair(p, x, f"seed:{seed}", latent)
    res = system.residual_norm(pair.x, pair.p, full=True)
    if not res <= START_TOL:
        raise StartPairError(f"start pair residual {res:.3e} exceeds {START_TOL:.0e}")
    return pair
