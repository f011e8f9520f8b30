import numpy as np
import pytest

from catconf import polyvec as pv
from catconf.presets import COUNT_PRESETS, build_count_system
from catconf.systems import (
    C2TWELVE,
    PUBLISHED_START_POINT,
    SEGRE6,
    ReducedQuarticSystem,
    StartPairError,
    bezout_slice_count,
    build_reduced_quartic_system,
    build_sextic_rank9_system,
    build_slice_system,
    build_waring_system,
    make_start_pair,
)

ALL = sorted(COUNT_PRESETS)


@pytest.mark.parametrize(
    "args, dims",
    [(((3, 3, 3), 6), 30), (((3, 3, 3, 2), 6), 36), (((4, 4, 4, 4), 10), 60)],
)
def test_waring_dimensions(args, dims):
    degrees, k = args
    s = build_waring_system(2, len(degrees), degrees, k)
    assert s.x_dim == s.p_dim == dims


def test_non_square_waring_case_is_rejected():
    with pytest.raises(ValueError, match="30.*35|35.*30"):
        build_waring_system(2, 3, (3, 3, 3), 7)


def test_waring_residual_vanishes_at_its_own_image():
    rng = np.random.default_rng(0)
    summands = pv.random_summands(rng, 2, 3, 6)
    s = build_waring_system(2, 3, (3, 3, 3), 6)
    x = np.concatenate([np.concatenate([nu, lam]) for nu, lam in summands])
    p = pv.waring_forward_eval(summands, (3, 3, 3)).coefficients()
    assert np.max(np.abs(s.residual(x, p))) <= 1e-13 * np.max(np.abs(p))
    assert [tuple(map(tuple, d)) for d in s.decomposition(x)] == [tuple(map(tuple, d)) for d in summands]


def test_reduced_quartic_layout():
    s = build_reduced_quartic_system()
    assert s.x_dim == s.p_dim == 40
    dropped = np.argwhere(~s.mask)
    assert dropped.tolist() == [[0, 20], [1, 15]]
    rng = np.random.default_rng(4)
    x = pv.random_complex(rng, 40)
    p = s.forward(x)
    M = s.full_matrix(x)
    # laying the 40 parameters back into the 2 x 21 matrix reproduces the kept entries exactly
    laid = ReducedQuarticSystem.parameters_to_matrix(p)
    assert np.array_equal(laid[s.mask], M[s.mask])
    assert laid[0, 20] == 0 and laid[1, 15] == 0
    assert np.array_equal(p[:20], M[0, :20])
    assert np.array_equal(p[20:35], M[1, :15]) and np.array_equal(p[35:], M[1, 16:])


def test_reduced_quartic_entries_are_unweighted_monomials():
    s = build_reduced_quartic_system()
    x = pv.random_complex(np.random.default_rng(8), 40)
    M = s.full_matrix(x)
    for col, (e0, e1, e2) in enumerate(pv.monomials(2, 5).list):
        assert e0 + e1 + e2 == 5
        for row in range(2):
            entry = sum(v[2 + row] * v[0] ** e1 * v[1] ** e2 for v in x.reshape(10, 4))
            assert M[row, col] == pytest.approx(entry, rel=1e-12)
    assert s.biform(x).matrix.shape == (2, 21)


def test_published_start_point():
    s = build_reduced_quartic_system()
    pair = make_start_pair(s, published=True)
    assert np.array_equal(pair.x, PUBLISHED_START_POINT)
    assert pair.x.size == 40
    assert pair.x[0] == complex(3.803150504548735e-1, 1.080968803617349e-1)
    assert pair.x[1] == complex(4.012914786260265e-2, 1.194906105430308e-2)
    assert s.residual_norm(pair.x, pair.p, full=True) <= 1e-12
    assert pair.provenance == "published"
    with pytest.raises(StartPairError):
        make_start_pair(build_count_system("london"), published=True)


def test_sextic_dimensions_and_full_start():
    s = build_sextic_rank9_system(0)
    assert s.x_dim == 27 and s.p_dim == 28 and s.R.shape == (27, 28)
    assert np.linalg.matrix_rank(s.R) == 27
    pair = make_start_pair(s, 3)
    assert s.full_residual(pair.x, pair.p).shape == (28,)
    assert s.residual_norm(pair.x, pair.p, full=True) <= 1e-12


def test_slice_counts_by_independent_expansion():
    assert bezout_slice_count(SEGRE6) == 6
    assert bezout_slice_count(C2TWELVE) == 12
    for preset in (SEGRE6, C2TWELVE):
        s = build_slice_system(preset, 0)
        assert s.x_dim == 4


@pytest.mark.parametrize("name", ALL)
def test_start_pairs_and_determinism(name):
    s = build_count_system(name, 0)
    a, b = make_start_pair(s, 17), make_start_pair(s, 17)
    assert s.residual_norm(a.x, a.p, full=True) <= 1e-12
    assert np.array_equal(a.x, b.x) and np.array_equal(a.p, b.p)
    assert a.x.tobytes() == b.x.tobytes()


@pytest.mark.parametrize("name", ALL)
def test_square(name):
    s = build_count_system(name, 0)
    x = s.sample_latent(np.random.default_rng(1))
    p = s.random_parameters(np.random.default_rng(2), np.ones(s.p_dim))
    assert s.residual(x, p).shape == (s.x_dim,)
    assert s.jacobian(x, p).shape == (s.x_dim, s.x_dim)


def _fd_jacobian(s, x, p, h=1e-6):
    J = np.empty((s.x_dim, s.x_dim), dtype=complex)
    for c in range(s.x_dim):
        e = np.zeros(s.x_dim, dtype=complex)
        e[c] = h
        J[:, c] = (s.residual(x + e, p) - s.residual(x - e, p)) / (2 * h)
    return J


@pytest.mark.parametrize("name", ALL)
def test_jacobian_matches_finite_differences(name):
    s = build_count_system(name, 0)
    rng = np.random.default_rng(21)
    for _ in range(10):
        x = s.sample_latent(rng)
        p = s.start_parameters(s.sample_latent(rng), rng)
        J = s.jacobian(x, p)
        err = np.max(np.abs(J - _fd_jacobian(s, x, p))) / np.max(np.abs(J))
        assert err <= 1e-5


@pytest.mark.parametrize("name", ALL)
def test_parameter_derivative_matches_finite_differences(name):
    s = build_count_system(name, 0)
    rng = np.random.default_rng(22)
    x = s.sample_latent(rng)
    p = s.start_parameters(x, rng)
    dp = pv.random_complex(rng, s.p_dim)
    h = 1e-6
    fd = (s.residual(x, p + h * dp) - s.residual(x, p - h * dp)) / (2 * h)
    exact = s.parameter_dt(x, p, dp)
    assert np.max(np.abs(exact - fd)) <= 1e-5 * max(1.0, np.max(np.abs(exact)))


@pytest.mark.parametrize("name", ALL)
def test_forward_residual_duality(name):
    s = build_count_system(name, 0)
    rng = np.random.default_rng(23)
    for _ in range(20):
        x = s.sample_latent(rng)
        p = s.start_parameters(x, rng)
        assert s.residual_norm(x, p, full=True) <= 1e-12


@pytest.mark.parametrize("name", ["london", "quartics-reduced", SEGRE6, C2TWELVE])
def test_linear_systems_are_affine_in_parameters(name):
    s = build_count_system(name, 0)
    rng = np.random.default_rng(24)
    x = s.sample_latent(rng)
    p, q = pv.random_complex(rng, s.p_dim), pv.random_complex(rng, s.p_dim)
    mid = s.residual(x, 0.3 * p + 0.7 * q)
    assert np.allclose(mid, 0.3 * s.residual(x, p) + 0.7 * s.residual(x, q), rtol=1e-12, atol=1e-12)


def test_unknown_preset():
    with pytest.raises(KeyError):
        build_count_system("nope")
