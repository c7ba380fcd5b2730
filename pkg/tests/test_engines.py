"""
Crisp engines: bottom-up, BDD (plain and modular), brute force
"""
import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzztree.benchgen import random_fault_tree
from fuzztree.config import Settings
from fuzztree.engines import (
    BddEngine, EngineChoice, ModularBddEngine, bdd_build, bdd_unreliability, bottom_up_crisp,
    bottom_up_fuzzy, compile_engine, default_variable_order, find_modules, select_engine,
)
from fuzztree.errors import (
    DimensionError, InvalidFaultTreeError, NotTreeStructuredError, ProbabilityRangeError,
    SizeLimitError,
)
from fuzztree.ft_model import FaultTree, NodeKind, structure_eval, unreliability_bruteforce
from fuzztree.fuzzy_core import AlphaFuzzy, Triangular, discretize, shape_to_discrete
from fuzztree.fuzzy_unreliability import fuzzy_unreliability_discrete

from strategies import PROPERTY_SETTINGS, fault_trees, shapes, trees_with_probs


@pytest.mark.parametrize("choice", list(EngineChoice))
def test_worked_example_all_engines(pump_tree, pump_probs, choice):
    engine = compile_engine(pump_tree, choice)
    assert engine(pump_probs) == pytest.approx(0.368, abs=1e-12)


def test_bottom_up_crisp(pump_tree, pump_probs):
    assert bottom_up_crisp(pump_tree, pump_probs) == pytest.approx(0.368, abs=1e-12)


def test_bottom_up_rejects_dag(shared_dag):
    with pytest.raises(NotTreeStructuredError, match="b"):
        bottom_up_crisp(shared_dag, [0.5] * 3)


def test_engines_reject_invalid_trees():
    t = FaultTree([NodeKind.AND, NodeKind.AND], [[1], [0]], 0)
    with pytest.raises(InvalidFaultTreeError):
        compile_engine(t, EngineChoice.BDD)


def test_bdd_shared_dag(shared_dag):
    bdd = bdd_build(shared_dag)
    assert bdd_unreliability(bdd, [0.5] * 3) == pytest.approx(0.375, abs=1e-12)
    # b & (a | c) under the order a, b, c
    assert bdd.node_count == 4


def test_bdd_matches_structure_function(shared_dag, pump_tree):
    for t in (shared_dag, pump_tree):
        bdd = bdd_build(t)
        for bits in itertools.product((0, 1), repeat=t.n_basic_events):
            assert bdd.evaluate(bits) == structure_eval(t, bits)


def test_bdd_node_accessor(pump_tree):
    bdd = bdd_build(pump_tree)
    top = bdd.node(bdd.root)
    assert top.variable == default_variable_order(pump_tree)[0]


def test_bdd_order_invariance_shared_dag(shared_dag):
    p = [0.3, 0.6, 0.9]
    expected = unreliability_bruteforce(shared_dag, p)
    for order in itertools.permutations(range(3)):
        bdd = bdd_build(shared_dag, order=order)
        assert bdd_unreliability(bdd, p) == pytest.approx(expected, abs=1e-12)


def test_bdd_order_must_be_permutation(shared_dag):
    with pytest.raises(DimensionError):
        bdd_build(shared_dag, order=[0, 0, 1])


def test_bdd_node_budget(shared_dag):
    with pytest.raises(SizeLimitError):
        bdd_build(shared_dag, node_budget=1)


def test_bdd_batch_and_range(shared_dag):
    bdd = bdd_build(shared_dag)
    p = np.array([[0.5, 1.0], [0.5, 1.0], [0.5, 0.0]])
    assert bdd_unreliability(bdd, p) == pytest.approx([0.375, 1.0], abs=1e-12)
    with pytest.raises(ProbabilityRangeError):
        bdd_unreliability(bdd, [0.5, 1.5, 0.5])
    with pytest.raises(DimensionError):
        bdd_unreliability(bdd, [0.5])


def test_default_variable_order_is_dfs(pump_tree):
    assert default_variable_order(pump_tree) == [0, 1, 2]


def test_find_modules(pump_tree, shared_dag):
    assert set(find_modules(pump_tree)) == {pump_tree.name_index['Valves'], pump_tree.root}
    assert find_modules(shared_dag) == [shared_dag.root]


def test_modular_engine_matches_plain_bdd():
    rng = random.Random(11)
    for _ in range(30):
        tree, probs = random_fault_tree(rng, rng.randint(1, 10), sharing=0.5)
        modular = ModularBddEngine(tree)
        assert tree.root in modular.modules
        assert modular(probs) == pytest.approx(BddEngine(tree)(probs), abs=1e-12)


def test_select_engine(pump_tree, shared_dag):
    assert select_engine(pump_tree) is EngineChoice.BOTTOM_UP
    assert select_engine(shared_dag) is EngineChoice.BDD


def test_compiled_engine_is_reusable(shared_dag):
    engine = compile_engine(shared_dag)
    for p in ([0.5] * 3, [0.1, 0.2, 0.3], [1.0, 0.0, 1.0]):
        assert engine(p) == pytest.approx(unreliability_bruteforce(shared_dag, p), abs=1e-12)


def test_bottom_up_fuzzy_crisp_inputs_reproduce_crisp(pump_tree, pump_probs):
    fp = [AlphaFuzzy.crisp(x, 10) for x in pump_probs]
    result = bottom_up_fuzzy(pump_tree, fp)
    assert result.is_crisp
    assert result.core[0] == pytest.approx(0.368, abs=1e-12)


def test_bottom_up_fuzzy_widens_with_inputs(pump_tree):
    fp = [discretize(Triangular(a=0.7, b=0.8, d=0.9), 10),
          AlphaFuzzy.crisp(0.1, 10), AlphaFuzzy.crisp(0.4, 10)]
    result = bottom_up_fuzzy(pump_tree, fp)
    assert result.support == pytest.approx((0.71 * 0.46, 0.89 * 0.46))
    assert result.core == pytest.approx((0.368, 0.368))


def _gatewise(t, p):
    """Gate formulas applied as if all children were independent"""
    value = {}
    for v in t.post_order:
        kind = t.kind(v)
        if kind is NodeKind.BE:
            value[v] = p[t.be_position(v)]
        elif kind is NodeKind.AND:
            value[v] = math.prod(value[w] for w in t.children[v])
        else:
            value[v] = 1.0 - math.prod(1.0 - value[w] for w in t.children[v])
    return value[t.root]


def test_gatewise_evaluation_is_wrong_on_shared_events(shared_dag, pump_tree, pump_probs):
    # b is counted twice: 1 - (1 - 0.25)(1 - 0.25)
    assert _gatewise(shared_dag, [0.5] * 3) == pytest.approx(0.4375, abs=1e-15)
    assert compile_engine(shared_dag)([0.5] * 3) == pytest.approx(0.375, abs=1e-12)
    assert _gatewise(pump_tree, pump_probs) == pytest.approx(bottom_up_crisp(pump_tree, pump_probs))


# === Properties ===

@PROPERTY_SETTINGS
@given(st.data(), trees_with_probs(max_events=10, sharing=True))
def test_bdd_is_order_invariant(data, case):
    tree, p = case
    n = tree.n_basic_events
    expected = unreliability_bruteforce(tree, p)
    orders = data.draw(st.lists(st.permutations(range(n)), min_size=5, max_size=5))
    bits = data.draw(st.lists(st.integers(min_value=0, max_value=1), min_size=n, max_size=n))
    for order in orders:
        bdd = bdd_build(tree, order=order)
        assert bdd_unreliability(bdd, p) == pytest.approx(expected, abs=1e-12)
        assert bdd.evaluate(bits) == structure_eval(tree, bits)


@PROPERTY_SETTINGS
@given(trees_with_probs(max_events=10))
def test_bottom_up_matches_brute_force(case):
    tree, p = case
    assert bottom_up_crisp(tree, p) == pytest.approx(unreliability_bruteforce(tree, p), abs=1e-12)


@PROPERTY_SETTINGS
@given(st.data(), fault_trees(max_events=10))
def test_bottom_up_fuzzy_matches_discrete_oracle(data, tree):
    n = tree.n_basic_events
    n_cuts = data.draw(st.integers(min_value=1, max_value=3 if n <= 5 else 1))
    specs = data.draw(st.lists(shapes(), min_size=n, max_size=n))
    result = bottom_up_fuzzy(tree, [discretize(s, n_cuts) for s in specs])
    oracle = fuzzy_unreliability_discrete(
        tree, [shape_to_discrete(s, n_cuts) for s in specs], settings=Settings())
    for k in range(n_cuts):
        lo, hi = oracle.alpha_cut((k + 1) / n_cuts)
        assert result.cut(k) == pytest.approx((lo, hi), abs=1e-12)


@PROPERTY_SETTINGS
@given(st.data(), trees_with_probs(max_events=10, sharing=True))
def test_unreliability_is_monotone_in_each_probability(data, case):
    tree, p = case
    i = data.draw(st.integers(min_value=0, max_value=len(p) - 1))
    raised = list(p)
    raised[i] = data.draw(st.floats(min_value=p[i], max_value=1.0, allow_nan=False))
    bdd = bdd_build(tree)
    assert bdd_unreliability(bdd, raised) >= bdd_unreliability(bdd, p) - 1e-12
    assert unreliability_bruteforce(tree, raised) >= unreliability_bruteforce(tree, p) - 1e-12
