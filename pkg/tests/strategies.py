"""
Hypothesis strategies: fuzzy shapes, alpha-cut numbers, fault trees
"""
import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fuzztree.ft_model import FaultTreeBuilder, NodeKind
from fuzztree.fuzzy_core import AlphaFuzzy, Interval, Trapezoidal, Triangular, TruncGaussian, discretize
from fuzztree.fuzzy_unreliability import FuzzyProbVector

# fixed example sequence per test; conftest has a function-scoped autouse fixture
PROPERTY_SETTINGS = settings(
    max_examples=100, derandomize=True, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)

SHAPE_KINDS = ('tri', 'trap', 'interval', 'gauss')


def _floats(lo, hi):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False, allow_infinity=False,
                     allow_subnormal=False)


unit_floats = _floats(0.0, 1.0)


############ Fuzzy numbers
@st.composite
def shapes(draw, lo=0.0, hi=1.0, kinds=SHAPE_KINDS):
    """Any shape with every parameter inside [lo, hi]"""
    kind = draw(st.sampled_from(kinds))
    if kind == 'gauss':
        m = draw(_floats(lo, hi))
        s = draw(_floats((hi - lo) * 1e-3, (hi - lo) / 2))
        return TruncGaussian(m=m, s=s, lo=lo, hi=hi)
    size = {'tri': 3, 'trap': 4, 'interval': 2}[kind]
    points = sorted(draw(st.lists(_floats(lo, hi), min_size=size, max_size=size)))
    if kind == 'tri':
        return Triangular(a=points[0], b=points[1], d=points[2])
    if kind == 'trap':
        return Trapezoidal(a=points[0], b=points[1], c=points[2], d=points[3])
    return Interval(a=points[0], b=points[1])


@st.composite
def nested_cuts(draw, n_cuts, lo=-5.0, hi=5.0):
    """Arbitrary nested cuts: 2N sorted points, lower ends rising and upper ends falling"""
    points = sorted(draw(st.lists(_floats(lo, hi), min_size=2 * n_cuts, max_size=2 * n_cuts)))
    return AlphaFuzzy(points[:n_cuts], points[n_cuts:][::-1])


def alpha_fuzzies(n_cuts, lo=-5.0, hi=5.0):
    return st.one_of(
        shapes(lo, hi).map(lambda shape: discretize(shape, n_cuts)),
        nested_cuts(n_cuts, lo, hi),
    )


@st.composite
def fuzzy_pairs(draw, lo=-5.0, hi=5.0, max_cuts=12):
    """Two fuzzy numbers on the same alpha grid"""
    n_cuts = draw(st.integers(min_value=1, max_value=max_cuts))
    return draw(alpha_fuzzies(n_cuts, lo, hi)), draw(alpha_fuzzies(n_cuts, lo, hi))


def is_nested(f: AlphaFuzzy) -> bool:
    return bool(np.all(f.lo <= f.hi) and np.all(np.diff(f.lo) >= 0) and np.all(np.diff(f.hi) <= 0))


############ Monotone polynomials
@st.composite
def monotone_polynomials(draw, arity):
    """(f, directions, lipschitz) for f = sum c_j prod y_i^e_ij with y_i = x_i or 1 - x_i.

    Nonnegative coefficients make f nondecreasing in x_i where y_i = x_i and
    nonincreasing where y_i = 1 - x_i, on [0, 1]^arity.
    """
    flips = draw(st.lists(st.booleans(), min_size=arity, max_size=arity))
    n_terms = draw(st.integers(min_value=1, max_value=4))
    coefficients = draw(st.lists(unit_floats, min_size=n_terms, max_size=n_terms))
    exponents = draw(st.lists(
        st.lists(st.integers(min_value=0, max_value=3), min_size=arity, max_size=arity),
        min_size=n_terms, max_size=n_terms))

    def f(*xs):
        ys = [1.0 - x if flip else x for x, flip in zip(xs, flips)]
        total = 0.0
        for c, es in zip(coefficients, exponents):
            term = c
            for y, e in zip(ys, es):
                term = term * y ** e
            total = total + term
        return total

    directions = tuple('nonincreasing' if flip else 'nondecreasing' for flip in flips)
    lipschitz = [sum(c * es[i] for c, es in zip(coefficients, exponents)) for i in range(arity)]
    return f, directions, lipschitz


############ Fault trees
@st.composite
def fault_trees(draw, max_events=8, sharing=False):
    """Valid FT over e0..e{n-1}; gates pick 2-3 current roots, optionally plus one shared node"""
    n = draw(st.integers(min_value=1, max_value=max_events))
    b = FaultTreeBuilder()
    roots = [f"e{i}" for i in range(n)]
    for name in roots:
        b.add_basic_event(name)
    consumed = []
    gates = 0
    while len(roots) > 1:
        k = draw(st.integers(min_value=2, max_value=min(3, len(roots))))
        picked = [roots.pop(draw(st.integers(min_value=0, max_value=len(roots) - 1)))
                  for _ in range(k)]
        kids = list(picked)
        if sharing and consumed and draw(st.booleans()):
            extra = draw(st.sampled_from(consumed))
            if extra not in kids:
                kids.append(extra)
        name = f"g{gates}"
        gates += 1
        b.add_gate(name, draw(st.sampled_from((NodeKind.AND, NodeKind.OR))), kids)
        consumed.extend(picked)
        roots.append(name)
    return b.build(roots[0])


@st.composite
def trees_with_probs(draw, max_events=8, sharing=False):
    tree = draw(fault_trees(max_events, sharing))
    n = tree.n_basic_events
    return tree, draw(st.lists(unit_floats, min_size=n, max_size=n))


@st.composite
def fuzzy_trees(draw, max_events=8, sharing=False, max_cuts=10, kinds=SHAPE_KINDS):
    """(tree, shapes, fuzzy probabilities) with every shape inside [0, 1]"""
    tree = draw(fault_trees(max_events, sharing))
    n = tree.n_basic_events
    specs = draw(st.lists(shapes(kinds=kinds), min_size=n, max_size=n))
    n_cuts = draw(st.integers(min_value=1, max_value=max_cuts))
    return tree, specs, FuzzyProbVector.from_shapes(specs, n_cuts)
