import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embhunter.embedding import DeterministicObjective
from embhunter.functions import CountingObjective, make_function
from embhunter.optimizers import (OptimizerConfig, embedded_hunter, hunt, random_search, resoo,
                                  run_algorithm, soo, split_budget, sresoo)
from embhunter.optimizers.comparators import augmented_embedding
from embhunter.spaces import BoxSpace, RngStream
from embhunter.embedding import sample_matrix

ALL = ["embedded_hunter", "resoo", "sresoo", "random_search"]


def small_cfg(**kw):
    base = dict(budget=200, d=3, M=3, seed=1)
    base.update(kw)
    return OptimizerConfig(**base)


@pytest.mark.parametrize("kw", [dict(K=4), dict(K=1), dict(budget=0), dict(M=0), dict(eta=1.0),
                                dict(h_max=0), dict(seed=-1)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        OptimizerConfig(**kw)


@pytest.mark.parametrize("name", ["ellipsoid", "rosenbrock", "ackley", "fletcherpowell"])
def test_single_evaluation_is_the_origin(name):
    f = make_function(name, 3, 30, seed=2)
    r = embedded_hunter(f, small_cfg(budget=1))
    assert r.evaluations == 1
    assert r.best_value == f(np.zeros(30))
    if name == "ellipsoid":
        assert r.best_value == 0.0


@pytest.mark.parametrize("budget", [1, 2, 10, 137, 400])
def test_zero_vector_evaluated_once(budget):
    f = make_function("rosenbrock", 3, 40, seed=4)
    r = embedded_hunter(f, small_cfg(budget=budget))
    zero = tuple([0] * 3)
    assert r.tree.ledger.count(zero) == 1


@pytest.mark.parametrize("alg", ALL)
def test_best_point_reproduces_best_value(alg):
    f = make_function("ackley", 3, 50, seed=5)
    r = run_algorithm(alg, f, small_cfg())
    assert f(r.best_x()) == r.best_value
    assert np.all(np.abs(r.best_x()) <= 1)


configs = st.fixed_dictionaries({
    "budget": st.integers(1, 250),
    "d": st.integers(1, 4),
    "M": st.integers(1, 6),
    "K": st.sampled_from([3, 5]),
    "h_max": st.one_of(st.none(), st.integers(1, 4)),
    "seed": st.integers(0, 2**63),
    "n": st.integers(4, 60),
    "fn": st.sampled_from(["ellipsoid", "rosenbrock", "ackley", "fletcherpowell"]),
})


@settings(max_examples=25)
@given(configs, st.sampled_from(ALL))
def test_budget_and_monotone_curve(c, alg):
    if alg in ("resoo", "sresoo") and c["budget"] < c["M"]:
        c["budget"] = c["M"]
    f = CountingObjective(make_function(c["fn"], min(c["d"], c["n"]), c["n"], seed=c["seed"] % 1000))
    cfg = OptimizerConfig(budget=c["budget"], d=c["d"], M=c["M"], K=c["K"], h_max=c["h_max"],
                          seed=c["seed"])
    r = run_algorithm(alg, f, cfg)
    assert f.calls == r.evaluations <= cfg.budget
    if not r.terminated_early:
        assert f.calls == cfg.budget
    values = [b for _, b in r.curve]
    assert [i for i, _ in r.curve] == list(range(1, r.evaluations + 1))
    assert all(b2 <= b1 for b1, b2 in zip(values, values[1:]))
    assert values[-1] == r.best_value


@settings(max_examples=20)
@given(st.integers(2, 400), st.integers(1, 4), st.integers(1, 8), st.integers(0, 2**32))
def test_hunter_cap_invariant(budget, d, M, seed):
    f = make_function("rosenbrock", d, 30, seed=3)
    r = embedded_hunter(f, OptimizerConfig(budget=budget, d=d, M=M, seed=seed))
    for node in r.tree.nodes():
        count = r.tree.ledger.count(node.key)
        assert count <= max(1, math.floor(M * node.norm) + 1)
        if node.parent is not None and node.fstar is not None and node.sq_norm > 0:
            # every created off-center or capped child was scored or inherited
            assert count >= 1 or node.fstar == node.parent.fstar


@settings(max_examples=15)
@given(st.integers(20, 400), st.integers(1, 4), st.integers(0, 2**32))
def test_expansions_strictly_improve_within_sweep(budget, d, seed):
    f = make_function("ackley", d, 30, seed=9)
    events = []
    embedded_hunter(f, OptimizerConfig(budget=budget, d=d, M=2, seed=seed), trace=events.append)
    by_sweep = {}
    for e in events:
        if e.action == "expand":
            by_sweep.setdefault(e.sweep, []).append(e.value)
    for vals in by_sweep.values():
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_hunter_stops_when_tree_is_exhausted():
    space = BoxSpace.symmetric(1, 1)
    r = hunt(DeterministicObjective(lambda y: float(y[0] ** 2), space, 1000), space, K=3,
             h_max=2, M=0)
    assert r.terminated_early
    assert r.evaluations == 1 + 2 + 2 * 3


def test_soo_quadratic_converges():
    space = BoxSpace.symmetric(1, 1)
    r = soo(lambda y: float((y[0] - 0.3) ** 2), space, 40, K=3)
    assert r.best_value <= 1e-2
    vals = [b for _, b in r.curve]
    assert all(b2 <= b1 for b1, b2 in zip(vals, vals[1:]))


@pytest.mark.parametrize("K", [3, 5, 7])
def test_soo_budget_equal_to_K_expands_root_once(K):
    space = BoxSpace.symmetric(2, 1)
    events = []
    r = soo(lambda y: float(y @ y + y[0]), space, K, K=K, trace=events.append)
    assert [e.action for e in events].count("expand") == 1
    assert r.evaluations == K


def test_split_budget():
    assert split_budget(10, 3) == [4, 3, 3]
    assert split_budget(10, 10) == [1] * 10
    with pytest.raises(ValueError):
        split_budget(4, 5)


def test_resoo_single_matrix_is_soo():
    f = make_function("rosenbrock", 3, 40, seed=8)
    cfg = small_cfg(M=1, budget=90)
    r = resoo(f, cfg)
    A = sample_matrix(40, 3, RngStream.for_purpose(cfg.seed, "resoo"))
    from embhunter.embedding import project
    from embhunter.spaces import make_low_space
    ref = soo(lambda y: f(project(A, y)), make_low_space(3, cfg.eta), 90, K=3,
              h_max=int(math.isqrt(90)))
    assert r.best_value == ref.best_value
    assert [b for _, b in r.curve] == [b for _, b in ref.curve]


def test_resoo_root_only_when_M_equals_budget():
    f = make_function("ellipsoid", 3, 40, seed=8)
    r = resoo(f, small_cfg(M=7, budget=7))
    assert r.evaluations == 7
    assert [b for _, b in r.curve] == [0.0] * 7


@pytest.mark.parametrize("alg", ALL)
def test_seeded_determinism(alg):
    f = make_function("fletcherpowell", 3, 40, seed=8)
    a = run_algorithm(alg, f, small_cfg(seed=77))
    b = run_algorithm(alg, f, small_cfg(seed=77))
    assert a.best_value == b.best_value
    assert a.curve == b.curve
    np.testing.assert_array_equal(a.best_x(), b.best_x())


def test_sresoo_augmented_embedding():
    f = make_function("ackley", 2, 20, seed=1)
    A = sample_matrix(20, 2, RngStream(1)).entries
    x_prev = np.random.default_rng(0).uniform(-1, 1, 20)
    embed = augmented_embedding(A, x_prev, beta=2 / 0.3)
    # alpha = 1, y = 0 reproduces the previous incumbent exactly
    assert f(embed(np.array([1.0, 0.0, 0.0]))) == f(x_prev)
    # with x_prev at the origin the alpha coordinate is inert
    embed0 = augmented_embedding(A, np.zeros(20), beta=2 / 0.3)
    z = np.array([0.0, 0.4, -0.2])
    np.testing.assert_array_equal(embed0(z), embed0(np.array([0.9, 0.4, -0.2])))


def test_sresoo_respects_budget_split():
    f = CountingObjective(make_function("rosenbrock", 2, 30, seed=1))
    r = sresoo(f, small_cfg(M=4, budget=101, d=2))
    assert f.calls == r.evaluations == 101


def test_random_search_examples():
    f = make_function("ellipsoid", 2, 10, seed=0)
    one = random_search(f, 1, seed=3)
    assert one.evaluations == 1 and len(one.curve) == 1
    a, b = random_search(f, 50, seed=3), random_search(f, 50, seed=3)
    assert a.curve == b.curve
    vals = [v for _, v in a.curve]
    assert all(v2 <= v1 for v1, v2 in zip(vals, vals[1:]))
