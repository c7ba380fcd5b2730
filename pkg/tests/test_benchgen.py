"""
Benchmark generator: tree combination, seeded growth and fuzzification
"""
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzztree.benchgen import (
    POOL_PROB_RANGE, POOL_SIZES, FuzzShape, GenConfig, default_base_pool, fuzzify, fuzzify_shapes,
    generate, horizontal_combine, random_fault_tree, random_pool_tree, vertical_combine,
)
from fuzztree.engines import bottom_up_crisp
from fuzztree.errors import NotABasicEventError, ProbabilityRangeError
from fuzztree.ft_model import FaultTree, NodeKind, ProbabilisticFaultTree, is_tree_structured
from fuzztree.fuzzy_core import Interval, Trapezoidal, Triangular, TruncGaussian, membership_at

from strategies import PROPERTY_SETTINGS


@pytest.fixture
def pool_pair():
    return random_pool_tree(random.Random(0), 10), random_pool_tree(random.Random(1), 11)


@pytest.fixture
def single_event_pool():
    return [ProbabilisticFaultTree(FaultTree([NodeKind.BE], [[]], 0), (0.1,))]


############ Combination
def test_combination_sizes(pool_pair):
    (t1, _), (t2, _) = pool_pair
    assert t1.node_count == 10 and t2.node_count == 11
    assert horizontal_combine(t1, t2, NodeKind.OR).node_count == 22
    at = t1.basic_events[0]
    assert vertical_combine(t1, t2, at).node_count == 20


@pytest.mark.parametrize("gate", [NodeKind.AND, NodeKind.OR])
def test_horizontal_combine_unreliability(pool_pair, gate):
    (t1, p1), (t2, p2) = pool_pair
    combined = horizontal_combine(t1, t2, gate)
    u1, u2 = bottom_up_crisp(t1, p1), bottom_up_crisp(t2, p2)
    expected = u1 * u2 if gate is NodeKind.AND else 1 - (1 - u1) * (1 - u2)
    assert combined.kind(combined.root) is gate
    assert bottom_up_crisp(combined, p1 + p2) == pytest.approx(expected, rel=1e-12)


def test_vertical_combine_substitutes_subtree(pool_pair):
    (t1, p1), (t2, p2) = pool_pair
    at = t1.basic_events[-1]
    pos = t1.be_position(at)
    combined = vertical_combine(t1, t2, at)
    u2 = bottom_up_crisp(t2, p2)
    substituted = list(p1)
    substituted[pos] = u2
    expected = bottom_up_crisp(t1, substituted)
    probs = p1[:pos] + p1[pos + 1:] + p2
    assert combined.n_basic_events == t1.n_basic_events - 1 + t2.n_basic_events
    assert bottom_up_crisp(combined, probs) == pytest.approx(expected, rel=1e-12)


def test_vertical_combine_at_root_event(pool_pair, single_event_pool):
    t1, _ = single_event_pool[0]
    (t2, _), _ = pool_pair
    combined = vertical_combine(t1, t2, 0)
    assert combined.node_count == t2.node_count
    assert combined.kinds == t2.kinds


def test_vertical_combine_rejects_gate(pool_pair):
    (t1, _), (t2, _) = pool_pair
    with pytest.raises(NotABasicEventError):
        vertical_combine(t1, t2, t1.root)


def test_horizontal_combine_rejects_be_gate(pool_pair):
    (t1, _), (t2, _) = pool_pair
    with pytest.raises(ValueError):
        horizontal_combine(t1, t2, NodeKind.BE)


############ Growth
def test_single_event_pool_target_one(single_event_pool):
    tree, probs = generate(GenConfig(target_size=1, base_pool=single_event_pool))
    assert tree.node_count == 1
    assert probs == (0.1,)


def test_single_event_pool_grows_horizontally(single_event_pool):
    tree, probs = generate(GenConfig(target_size=5, base_pool=single_event_pool, combine_bias=0.0))
    assert tree.node_count == 5
    assert tree.n_basic_events == 3
    assert is_tree_structured(tree)


@pytest.mark.parametrize("target", [1, 50, 300, 1000])
def test_generated_trees(target):
    tree, probs = generate(GenConfig(seed=3, target_size=target))
    assert tree.is_valid
    assert is_tree_structured(tree)
    assert target <= tree.node_count <= target + max(POOL_SIZES)
    assert len(probs) == tree.n_basic_events
    assert all(POOL_PROB_RANGE[0] <= x <= POOL_PROB_RANGE[1] for x in probs)


def test_generation_is_deterministic():
    cfg = GenConfig(seed=42, target_size=400, dag=True, dag_sharing=0.5)
    (t1, p1), (t2, p2) = generate(cfg), generate(cfg)
    assert t1.kinds == t2.kinds
    assert t1.children == t2.children
    assert t1.names == t2.names
    assert p1 == p2


def test_dag_mode_without_sharing_is_a_tree():
    tree, _ = generate(GenConfig(seed=5, target_size=300, dag=True, dag_sharing=0.0))
    assert is_tree_structured(tree)


def test_dag_mode_shares_nodes():
    trees = [generate(GenConfig(seed=s, target_size=300, dag=True, dag_sharing=1.0))[0]
             for s in range(5)]
    assert all(t.is_valid for t in trees)
    assert any(not is_tree_structured(t) for t in trees)


def test_combine_bias_extremes():
    horizontal, _ = generate(GenConfig(seed=1, target_size=200, combine_bias=1.0))
    vertical, _ = generate(GenConfig(seed=1, target_size=200, combine_bias=0.0))
    assert horizontal.is_valid and vertical.is_valid
    assert horizontal.node_count >= 200 and vertical.node_count >= 200


def test_gen_config_validation(pool_pair):
    with pytest.raises(ValueError):
        GenConfig(target_size=0)
    with pytest.raises(ValueError):
        GenConfig(target_size=10, base_pool=[])
    (t1, p1), _ = pool_pair
    with pytest.raises(ValueError):
        GenConfig(target_size=10, base_pool=[(t1, p1[:-1])])
    with pytest.raises(ValueError):
        GenConfig(target_size=10, combine_bias=1.5)


def test_default_base_pool():
    pool = default_base_pool()
    assert [member.tree.node_count for member in pool] == list(POOL_SIZES)
    assert all(is_tree_structured(member.tree) for member in pool)
    assert [m.probs for m in default_base_pool()] == [m.probs for m in pool]


def test_random_fault_tree(random_trees):
    for tree, probs in random_trees(20, max_events=8):
        assert tree.is_valid and is_tree_structured(tree)
        assert len(probs) == tree.n_basic_events
    shared = random_trees(20, max_events=8, sharing=1.0, seed=3)
    assert all(tree.is_valid for tree, _ in shared)
    single, probs = random_fault_tree(random.Random(0), 1)
    assert single.node_count == 1 and len(probs) == 1
    with pytest.raises(ValueError):
        random_fault_tree(random.Random(0), 0)


############ Fuzzification
def test_fuzzify_triangular():
    (shape,) = fuzzify_shapes([0.5], FuzzShape.TRIANGULAR, 0.2)
    assert isinstance(shape, Triangular)
    assert (shape.a, shape.b, shape.d) == pytest.approx((0.4, 0.5, 0.6))
    fp = fuzzify([0.5], FuzzShape.TRIANGULAR, 0.2, n_cuts=10)
    assert fp[0].core == pytest.approx((0.5, 0.5))
    assert fp[0].support == pytest.approx((0.41, 0.59))


def test_fuzzify_zero_probability_is_crisp():
    shapes = fuzzify_shapes([0.0, 0.3], FuzzShape.TRIANGULAR, 0.0)
    assert shapes == [Interval(a=0.0, b=0.0), Interval(a=0.3, b=0.3)]


def test_fuzzify_clamps_to_unit():
    (shape,) = fuzzify_shapes([0.9], FuzzShape.TRIANGULAR, 0.2)
    assert shape.d == 1.0


def test_fuzzify_other_shapes():
    (trap,) = fuzzify_shapes([0.5], FuzzShape.TRAPEZOIDAL, 0.2)
    assert isinstance(trap, Trapezoidal)
    assert (trap.a, trap.b, trap.c, trap.d) == pytest.approx((0.4, 0.45, 0.55, 0.6))
    (gauss,) = fuzzify_shapes([0.3], FuzzShape.GAUSSIAN, 0.3)
    assert isinstance(gauss, TruncGaussian)
    assert (gauss.m, gauss.s) == pytest.approx((0.3, 0.03))
    mixed = fuzzify_shapes([0.01 * i for i in range(1, 40)], FuzzShape.MIXED, 0.2, random.Random(7))
    assert {type(s) for s in mixed} == {Triangular, Trapezoidal, TruncGaussian}


def test_fuzzify_rejects_bad_input():
    with pytest.raises(ProbabilityRangeError):
        fuzzify_shapes([1.2])
    with pytest.raises(ValueError):
        fuzzify_shapes([0.5], spread=2.0)


def test_fuzzified_trapezoid_plateau_contains_p():
    fp = fuzzify([0.5], FuzzShape.TRAPEZOIDAL, 0.2, n_cuts=10)
    assert fp[0].core == pytest.approx((0.45, 0.55))
    assert membership_at(fp[0], 0.5) == 1.0


@PROPERTY_SETTINGS
@given(st.lists(st.one_of(st.just(0.0), st.floats(min_value=1e-6, max_value=1.0)),
                min_size=1, max_size=20),
       st.sampled_from(list(FuzzShape)),
       st.floats(min_value=0.0, max_value=1.0, allow_subnormal=False),
       st.integers(min_value=1, max_value=12),
       st.integers(min_value=0, max_value=2 ** 16))
def test_fuzzified_probabilities_have_full_membership(p, shape, spread, n_cuts, seed):
    fp = fuzzify(p, shape, spread, n_cuts, random.Random(seed))
    assert len(fp) == len(p)
    for v, x in enumerate(p):
        assert membership_at(fp[v], x) == 1.0
        lo, hi = fp[v].support
        assert 0.0 <= lo <= x <= hi <= 1.0
