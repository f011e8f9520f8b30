from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catconf import polyvec as pv
from catconf.catalecticant import (
    Rank1Point,
    build_catalecticant,
    build_stacked_catalecticant,
    generating_memberships,
    membership_residual,
    numerical_rank,
    octic_hyperplane_check,
    rank_report,
)
from catconf.presets import RANK_PRESETS


def test_pure_cube_vector_has_rank_one():
    f = pv.waring_forward_eval([((0, 0), (1, 1, 1))], (3, 3, 3))
    cat = build_catalecticant(f, 2)
    assert cat.shape == (9, 6)
    assert cat.rank == 1
    assert len(cat.blocks) == 3 and all(b.shape == (3, 6) for b in cat.blocks)


def test_block_columns_are_derivatives():
    rng = np.random.default_rng(0)
    f = pv.waring_forward_eval(pv.random_summands(rng, 2, 3, 6), (3, 3, 3))
    cat = build_catalecticant(f, 2)
    for j, block in enumerate(cat.blocks):
        for c, op in enumerate(pv.monomials(2, 2).list):
            assert np.array_equal(block[:, c], pv.apply_operator(f.forms[j], op).coeffs)


@pytest.mark.parametrize("name", sorted(RANK_PRESETS))
def test_generic_preset_ranks(name):
    preset = RANK_PRESETS[name]
    f, summands = preset.instance(11)
    cat = build_catalecticant(f, preset.h)
    d = preset.degree
    assert cat.shape == (preset.r * len(pv.monomials(2, d - preset.h)), len(pv.monomials(2, preset.h)))
    assert cat.rank == preset.k
    assert cat.gap <= 1e-6
    assert max(generating_memberships(cat, summands, f.degrees)) <= 1e-10


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(3)) == 3
    rng = np.random.default_rng(1)
    u, v = pv.random_complex(rng, 5), pv.random_complex(rng, 4)
    assert numerical_rank(np.outer(u, v)) == 1
    assert numerical_rank(np.zeros((3, 3))) == 0


def _reconstructed(summands, degrees, h):
    # sum over summands of (rank-one point) x (scaled operator evaluations)
    d = degrees[0]
    M = 0
    for nu, lam in summands:
        point = Rank1Point.from_summand(nu, lam, degrees, h).vector
        ops = pv.veronese(h, np.concatenate([[1.0], nu])) * factorial(d) / factorial(d - h)
        M = M + np.outer(point, ops)
    return M


@pytest.mark.parametrize("name", sorted(RANK_PRESETS))
def test_matrix_is_sum_of_rank_one_structures(name):
    preset = RANK_PRESETS[name]
    f, summands = preset.instance(4)
    M = build_catalecticant(f, preset.h).matrix
    R = _reconstructed(summands, f.degrees, preset.h)
    assert np.max(np.abs(M - R)) <= 1e-10 * np.max(np.abs(M))


def test_rank_grows_with_summands():
    rng = np.random.default_rng(5)
    summands = pv.random_summands(rng, 2, 3, 6)
    ranks = [build_catalecticant(pv.waring_forward_eval(summands[:k], (3, 3, 3)), 2).rank for k in range(1, 7)]
    assert ranks == sorted(ranks)
    assert ranks == [1, 2, 3, 4, 5, 6]


def test_membership_of_basis_columns_and_projection_oracle():
    rng = np.random.default_rng(2)
    A = pv.random_complex(rng, (9, 6))
    Q, _ = np.linalg.qr(A)
    for c in range(6):
        assert membership_residual(Q[:, c], Q) <= 1e-14
    v = pv.random_complex(rng, 9)
    v = v / np.linalg.norm(v)
    # brute-force projection through least squares on the original spanning set
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    assert membership_residual(v, Q) == pytest.approx(np.linalg.norm(v - A @ coef), abs=1e-13)
    with pytest.raises(ValueError):
        membership_residual(np.zeros(9), Q)


def test_london_generating_points_lie_in_image():
    f, summands = RANK_PRESETS["cubics333"].instance(8)
    cat = build_catalecticant(f, 2)
    res = generating_memberships(cat, summands, f.degrees)
    assert len(res) == 6 and max(res) <= 1e-10
    # for h = d - 1 the chunks are lambda^j (1, nu^1, nu^2)
    nu, lam = summands[0]
    point = Rank1Point.from_summand(nu, lam, f.degrees, 2)
    assert np.allclose(point.vector, np.concatenate([l * np.array([1, *nu]) for l in lam]))
    # a generic off-image point is not contained
    off = Rank1Point.from_summand(*pv.random_summands(np.random.default_rng(99), 2, 3, 1)[0], f.degrees, 2)
    assert membership_residual(off, cat.image_basis) > 1e-3


def test_octic_hyperplane():
    f, summands = RANK_PRESETS["octic-rank14"].instance(7)
    rank, residuals = octic_hyperplane_check(f, summands)
    assert rank == 14
    assert len(residuals) == 14 and max(residuals) <= 1e-10
    single = pv.waring_forward_eval([((0.3, -0.5j), (1.0,))], (8,))
    assert octic_hyperplane_check(single, [((0.3, -0.5j), (1.0,))])[0] == 1


def test_mixed_degrees_need_stacking():
    rng = np.random.default_rng(6)
    summands = pv.random_summands(rng, 2, 4, 6)
    f = pv.waring_forward_eval(summands, (3, 3, 3, 2))
    with pytest.raises(ValueError):
        build_catalecticant(f, 2)
    cat = build_stacked_catalecticant(f, 2)
    assert cat.shape == (10, 6)
    assert cat.rank == 6
    assert max(generating_memberships(cat, summands, f.degrees)) <= 1e-10


def test_order_out_of_range():
    f, _ = RANK_PRESETS["cubics333"].instance(0)
    for h in (0, 3):
        with pytest.raises(ValueError):
            build_catalecticant(f, h)


def test_rank_report_fields():
    f, summands = RANK_PRESETS["sextic-rank9"].instance(1)
    cat = build_catalecticant(f, 3)
    rep = rank_report(cat, generating_memberships(cat, summands, f.degrees))
    assert set(rep) == {"shape", "rank", "sigma", "gap", "memberships"}
    assert rep["shape"] == [10, 10] and rep["rank"] == 9 and len(rep["memberships"]) == 9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), re=st.floats(-1e3, 1e3), im=st.floats(-1e3, 1e3))
def test_rank_is_scale_invariant(seed, re, im):
    c = complex(re, im)
    if abs(c) < 1e-6:
        c = 1.0
    f, _ = RANK_PRESETS["cubics333"].instance(seed % 1000)
    M = build_catalecticant(f, 2).matrix
    assert numerical_rank(c * M) == numerical_rank(M) == 6


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), re=st.floats(-1e3, 1e3), im=st.floats(-1e3, 1e3))
def test_membership_invariant_under_point_scale_and_basis_rotation(seed, re, im):
    c = complex(re, im)
    if abs(c) < 1e-6:
        c = 1.0
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(pv.random_complex(rng, (9, 6)))
    U, _ = np.linalg.qr(pv.random_complex(rng, (6, 6)))
    v = pv.random_complex(rng, 9)
    base = membership_residual(v, Q)
    assert abs(membership_residual(c * v, Q) - base) <= 1e-12
    assert abs(membership_residual(v, Q @ U) - base) <= 1e-12
