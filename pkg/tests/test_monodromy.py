import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catconf import polyvec as pv
from catconf.monodromy import (
    InvalidStartError,
    MonodromyConfig,
    SolutionClassSet,
    dedup,
    initial_state,
    run,
    scaled_sigma_min,
    solution_set_json,
    triangle_loop,
)
from catconf.presets import build_count_system
from catconf.systems import StartPair, make_start_pair


@pytest.fixture(scope="module")
def london():
    s = build_count_system("london")
    pair = make_start_pair(s, 3)
    state = run(s, pair, MonodromyConfig(), seed=3)
    return s, pair, state


def test_permuted_summands_are_equivalent():
    a = pv.random_complex(np.random.default_rng(0), (6, 5))
    assert dedup(a, a[[3, 0, 5, 1, 4, 2]])
    assert dedup(a, a + 1e-10)
    assert not dedup(a, a + 1e-3)
    assert not dedup(a, a[:5])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), perm=st.permutations(range(10)))
def test_dedup_is_permutation_invariant(seed, perm):
    rng = np.random.default_rng(seed)
    a = pv.random_complex(rng, (10, 4))
    b = a + 1e-9 * pv.random_complex(rng, (10, 4))
    assert dedup(a, b[list(perm)])
    assert dedup(b[list(perm)], a)


def test_london_has_two_distinct_classes(london):
    s, pair, state = london
    assert state.stabilized and state.count == 2
    first, second = state.classes.valid
    assert not dedup(first.summands, second.summands)
    for c in state.classes.valid:
        assert s.residual_norm(c.x, state.base_p, full=True) <= 1e-8
        assert scaled_sigma_min(s.jacobian(c.x, state.base_p), c.x, state.base_p) >= 1e-6
    assert state.history == sorted(state.history)
    assert state.loops_since_new >= 8


def test_start_class_is_kept(london):
    s, pair, state = london
    assert state.classes.find(s.summands(pair.x)) == 0


def test_constant_loop_adds_nothing(london):
    s, pair, state = london
    before = [c.x.copy() for c in state.classes]
    fresh = initial_state(s, pair, MonodromyConfig(), seed=0)
    triangle_loop(s, fresh, MonodromyConfig(), aux=(pair.p, pair.p))
    assert len(fresh.classes) == 1 and fresh.loops_since_new == 1
    assert np.array_equal(fresh.classes.classes[0].x, before[0])


def test_other_seed_finds_the_same_classes(london):
    s, pair, state = london
    again = run(s, pair, MonodromyConfig(), seed=11)
    assert again.count == state.count
    for c in again.classes.valid:
        assert state.classes.find(c.summands) is not None


def test_conjugate_base_has_conjugate_classes(london):
    s, pair, state = london
    conj = SolutionClassSet(s, state.base_p.conj(), MonodromyConfig())
    for c in state.classes.valid:
        assert conj.add(c.x.conj()) == "new"
    assert len(conj.valid) == state.count
    assert all(cls.is_real is False for cls in conj.valid)


def test_seeded_runs_are_reproducible():
    s = build_count_system("london")
    pair = make_start_pair(s, 5)
    cfg = MonodromyConfig(max_loops=3)
    a, b = run(s, pair, cfg, seed=2), run(s, pair, cfg, seed=2)
    assert a.history == b.history and a.path_failures == b.path_failures
    assert [c.x.tobytes() for c in a.classes] == [c.x.tobytes() for c in b.classes]


def test_thread_count_does_not_change_results():
    s = build_count_system("segre-slice-6", 0)
    pair = make_start_pair(s, 1)
    one = run(s, pair, MonodromyConfig(max_loops=4, threads=1), seed=4)
    many = run(s, pair, MonodromyConfig(max_loops=4, threads=3), seed=4)
    assert one.history == many.history
    assert [c.x.tobytes() for c in one.classes] == [c.x.tobytes() for c in many.classes]


def test_budget_exhaustion_is_flagged():
    s = build_count_system("london")
    state = run(s, make_start_pair(s, 1), MonodromyConfig(max_loops=1), seed=1)
    assert state.loops_run == 1 and not state.stabilized


def test_bad_start_is_rejected():
    s = build_count_system("london")
    pair = make_start_pair(s, 1)
    with pytest.raises(InvalidStartError):
        initial_state(s, StartPair(pair.p, pair.x + 1e-3, "broken"), MonodromyConfig(), 0)


def test_solution_json_lists_only_valid_classes(london):
    s, pair, state = london
    out = solution_set_json(state, "london")
    assert {"preset", "seed", "base_p", "classes", "loops_run", "stabilized", "path_failures"} <= set(out)
    assert len(out["classes"]) == 2 and len(out["base_p"]) == 30
    assert all(len(c["summands"]) == 6 and c["residual"] <= 1e-8 for c in out["classes"])


def test_singular_jacobian_scores_zero():
    J = pv.random_complex(np.random.default_rng(0), (5, 5))
    J[:, 4] = J[:, 0] + 2 * J[:, 1]
    x = np.ones(5)
    assert scaled_sigma_min(J, x, x) <= 1e-14
    assert scaled_sigma_min(np.eye(3)) == 1.0
