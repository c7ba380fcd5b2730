"""
Crisp unreliability engines and the fuzzy bottom-up algorithm

- bottom-up over tree-structured fault trees and its fuzzy lift through the gates
- reduced ordered BDDs built by Shannon expansion with a unique table and an
  apply cache, for general DAG-structured fault trees
- optional modularization: independent sub-DAGs are solved on their own and
  enter their parent as a pseudo basic event
"""
import contextlib
import logging
import sys
from enum import Enum
from functools import reduce
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DimensionError, GridMismatchError, NotTreeStructuredError, ProbabilityRangeError, SizeLimitError,
)
from .ft_model import (
    FaultTree, NodeKind, as_prob_vector, is_tree_structured, require_valid,
    unreliability_bruteforce, _check_cap,
)
from .fuzzy_core import AlphaFuzzy, Monotone, zadeh_endpoint_map

logger = logging.getLogger(__name__)

FALSE = 0
TRUE = 1


class EngineChoice(str, Enum):
    BOTTOM_UP = "bottomup"
    BDD = "bdd"
    BRUTE_FORCE = "bruteforce"


def _require_tree(t: FaultTree):
    if not is_tree_structured(t):
        shared = [t.name(v) for v, p in enumerate(t.parents) if len(p) > 1]
        raise NotTreeStructuredError(
            "bottom-up evaluation needs a tree-structured fault tree; "
            f"shared node(s): {', '.join(shared[:5])}")


# === Bottom-up (tree-structured) ===

def _and_product(*values):
    acc = values[0]
    for x in values[1:]:
        acc = acc * x
    return acc


def _or_product(*values):
    acc = 1.0
    for x in values:
        acc = acc * (1.0 - x)
    return 1.0 - acc


def bottom_up_crisp(t: FaultTree, p) -> float:
    """Unreliability of a tree-structured FT by one post-order pass"""
    return BottomUpEngine(t)(p)


def bottom_up_fuzzy(t: FaultTree, fp) -> AlphaFuzzy:
    """Fuzzy unreliability of a tree-structured FT, one endpoint map per gate"""
    require_valid(t)
    _require_tree(t)
    entries = list(fp)
    if len(entries) != t.n_basic_events:
        raise DimensionError(
            f"{len(entries)} fuzzy probabilities for {t.n_basic_events} basic events")
    if len({e.n_cuts for e in entries}) > 1:
        raise GridMismatchError("fuzzy probabilities use different alpha grids")

    value = {}
    for v in t.post_order:
        kind = t.kind(v)
        if kind is NodeKind.BE:
            value[v] = entries[t.be_position(v)]
            continue
        kids = [value[w] for w in t.children[v]]
        f = _and_product if kind is NodeKind.AND else _or_product
        value[v] = zadeh_endpoint_map(f, (Monotone.NONDECREASING,) * len(kids), kids)
    return value[t.root]


class BottomUpEngine:
    """Compiled post-order product pass; reusable across probability vectors"""

    def __init__(self, t: FaultTree):
        require_valid(t)
        _require_tree(t)
        self.tree = t
        self._program = [
            (v, t.kind(v), t.be_position(v) if t.kind(v) is NodeKind.BE else t.children[v])
            for v in t.post_order
        ]

    def __call__(self, p) -> float:
        p = as_prob_vector(self.tree, p)
        if p.ndim != 1:
            raise DimensionError("bottom-up evaluates one probability vector at a time")
        probs = p.tolist()
        value = [0.0] * self.tree.node_count
        for v, kind, arg in self._program:
            if kind is NodeKind.BE:
                value[v] = probs[arg]
            elif kind is NodeKind.AND:
                acc = 1.0
                for w in arg:
                    acc *= value[w]
                value[v] = acc
            else:
                acc = 1.0
                for w in arg:
                    acc *= 1.0 - value[w]
                value[v] = 1.0 - acc
        return value[self.tree.root]


# === Binary decision diagrams ===

class BddNode(NamedTuple):
    variable: int
    low: int
    high: int


@contextlib.contextmanager
def _recursion_headroom(depth: int):
    old = sys.getrecursionlimit()
    if depth > old - 200:
        sys.setrecursionlimit(depth + 1000)
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


class _BddBuilder:
    """Mutable manager for one build: unique table plus apply cache"""

    def __init__(self, n_levels: int, node_budget: Optional[int] = None):
        self.n_levels = n_levels
        self.node_budget = node_budget
        self._succ = {}
        self._pred = {}
        self._apply_cache = {}
        self._next = 2

    def level(self, u: int) -> int:
        if u <= TRUE:
            return self.n_levels
        return self._succ[u][0]

    def find_or_add(self, level: int, low: int, high: int) -> int:
        # eliminate
        if low == high:
            return low
        key = (level, low, high)
        u = self._pred.get(key)
        if u is not None:
            return u
        if self.node_budget is not None and len(self._succ) >= self.node_budget:
            raise SizeLimitError(f"BDD exceeds the node budget of {self.node_budget}")
        u = self._next
        self._next += 1
        self._pred[key] = u
        self._succ[u] = key
        return u

    def var(self, level: int) -> int:
        return self.find_or_add(level, FALSE, TRUE)

    def _cofactors(self, u: int, level: int):
        if u > TRUE:
            i, low, high = self._succ[u]
            if i == level:
                return low, high
        return u, u

    def apply(self, op: NodeKind, u: int, v: int) -> int:
        if op is NodeKind.AND:
            if u == FALSE or v == FALSE:
                return FALSE
            if u == TRUE:
                return v
            if v == TRUE:
                return u
        else:
            if u == TRUE or v == TRUE:
                return TRUE
            if u == FALSE:
                return v
            if v == FALSE:
                return u
        if u == v:
            return u
        if u > v:
            u, v = v, u
        key = (op, u, v)
        r = self._apply_cache.get(key)
        if r is not None:
            return r
        z = min(self.level(u), self.level(v))
        u0, u1 = self._cofactors(u, z)
        v0, v1 = self._cofactors(v, z)
        r = self.find_or_add(z, self.apply(op, u0, v0), self.apply(op, u1, v1))
        self._apply_cache[key] = r
        return r

    def freeze(self, root: int, order: Sequence[int]) -> 'Bdd':
        nodes = {}
        stack = [root]
        while stack:
            u = stack.pop()
            if u <= TRUE or u in nodes:
                continue
            nodes[u] = self._succ[u]
            stack.append(self._succ[u][1])
            stack.append(self._succ[u][2])
        return Bdd(root, nodes, order)


class Bdd:
    """Reduced ordered BDD over basic-event positions (read-only after build)"""

    def __init__(self, root: int, nodes: dict, order: Sequence[int]):
        self.root = root
        self.order = tuple(order)
        self._nodes = dict(nodes)
        # children are created before their parents, so ascending ids are bottom-up
        self._schedule = [(u, self.order[i], low, high)
                          for u, (i, low, high) in sorted(self._nodes.items())]

    @property
    def node_count(self) -> int:
        """Internal (non-terminal) nodes"""
        return len(self._nodes)

    @property
    def n_variables(self) -> int:
        return len(self.order)

    def node(self, u: int) -> BddNode:
        level, low, high = self._nodes[u]
        return BddNode(self.order[level], low, high)

    def evaluate(self, bits) -> int:
        """Follow one path from the root for a status vector"""
        bits = list(bits)
        if len(bits) != self.n_variables:
            raise DimensionError(f"status vector has {len(bits)} entries, BDD has "
                                 f"{self.n_variables} variables")
        u = self.root
        while u > TRUE:
            level, low, high = self._nodes[u]
            u = high if bits[self.order[level]] else low
        return u

    def __repr__(self):
        return f"Bdd(nodes={self.node_count}, variables={self.n_variables})"


def default_variable_order(t: FaultTree) -> list:
    """Basic-event positions in first-DFS-visit order from the root"""
    seen = bytearray(t.node_count)
    order = []
    stack = [t.root]
    while stack:
        v = stack.pop()
        if seen[v]:
            continue
        seen[v] = 1
        if t.kind(v) is NodeKind.BE:
            order.append(t.be_position(v))
        else:
            stack.extend(reversed(t.children[v]))
    return order


def _check_order(order, n: int) -> list:
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise DimensionError(f"variable order must be a permutation of 0..{n - 1}")
    return order


def _build_view(t: FaultTree, root: int, leaf_variable: dict, order: Sequence[int],
                node_budget: Optional[int]) -> Bdd:
    """BDD of the sub-DAG under `root`, treating `leaf_variable` keys as variables"""
    level_of = {var: level for level, var in enumerate(order)}
    builder = _BddBuilder(len(order), node_budget)

    # post-order over the view, stopping at leaves
    value = {}
    stack = [(root, False)]
    with _recursion_headroom(2 * len(order)):
        while stack:
            v, expanded = stack.pop()
            if v in value:
                continue
            if v in leaf_variable:
                value[v] = builder.var(level_of[leaf_variable[v]])
                continue
            if not expanded:
                stack.append((v, True))
                stack.extend((w, False) for w in reversed(t.children[v]) if w not in value)
                continue
            kind = t.kind(v)
            kids = [value[w] for w in t.children[v]]
            value[v] = reduce(lambda acc, w: builder.apply(kind, acc, w), kids[1:], kids[0])
    bdd = builder.freeze(value[root], order)
    logger.debug("built BDD with %d nodes (%d in unique table)", bdd.node_count,
                 len(builder._succ))
    return bdd


def bdd_build(t: FaultTree, order: Optional[Sequence[int]] = None,
              node_budget: Optional[int] = None) -> Bdd:
    """ROBDD of S_T under the given order of basic-event positions"""
    require_valid(t)
    if order is None:
        order = default_variable_order(t)
    order = _check_order(order, t.n_basic_events)
    leaves = {v: t.be_position(v) for v in t.basic_events}
    return _build_view(t, t.root, leaves, order, node_budget)


def _bdd_probability(bdd: Bdd, values):
    prob = {FALSE: 0.0, TRUE: 1.0}
    for u, var, low, high in bdd._schedule:
        q = values[var]
        prob[u] = q * prob[high] + (1.0 - q) * prob[low]
    return prob[bdd.root]


def bdd_unreliability(bdd: Bdd, p):
    """Pr(root) by Pr(u) = p_var Pr(high) + (1 - p_var) Pr(low), children first.

    p may be a batch of shape (n, K); a length-K array is returned then.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim not in (1, 2) or p.shape[0] < bdd.n_variables:
        raise DimensionError(
            f"BDD variable index {bdd.n_variables - 1} is out of range for "
            f"a probability vector of shape {p.shape}")
    if not np.all((p >= 0.0) & (p <= 1.0)):
        raise ProbabilityRangeError("probabilities must lie in [0, 1]")
    if p.ndim == 1:
        return float(_bdd_probability(bdd, p.tolist()))
    result = _bdd_probability(bdd, list(p))
    return np.broadcast_to(np.asarray(result, dtype=float), (p.shape[1],)).copy()


class BddEngine:
    """BDD compiled once, evaluated per probability vector"""

    def __init__(self, t: FaultTree, order=None, node_budget: Optional[int] = None):
        self.tree = t
        self.bdd = bdd_build(t, order, node_budget)
        logger.info("BDD engine: %d nodes over %d basic events", self.bdd.node_count,
                    t.n_basic_events)

    def __call__(self, p):
        as_prob_vector(self.tree, p)
        return bdd_unreliability(self.bdd, p)


# === Modularization ===

def find_modules(t: FaultTree) -> list:
    """Gates whose sub-DAG is entered only through the gate itself.

    Linear-time visit-date test: a gate is a module iff every descendant is
    first visited after it and last visited before its traversal ends.
    """
    require_valid(t)
    n = t.node_count
    first = [0] * n
    exit_ = [0] * n
    last = [0] * n
    date = 0
    stack = [(t.root, 0)]
    date += 1
    first[t.root] = last[t.root] = date
    while stack:
        v, i = stack[-1]
        kids = t.children[v]
        if i < len(kids):
            stack[-1] = (v, i + 1)
            w = kids[i]
            date += 1
            if first[w]:
                last[w] = date
            else:
                first[w] = last[w] = date
                stack.append((w, 0))
        else:
            stack.pop()
            date += 1
            exit_[v] = date

    lowest = {}
    highest = {}
    modules = []
    for v in t.post_order:
        kids = t.children[v]
        if not kids:
            continue
        lo = min(min(first[w], lowest.get(w, first[w])) for w in kids)
        hi = max(max(last[w], highest.get(w, last[w])) for w in kids)
        lowest[v], highest[v] = lo, hi
        if first[v] < lo and hi < exit_[v]:
            modules.append(v)
    return modules


class ModularBddEngine:
    """One BDD per module; solved modules enter their parent as pseudo basic events"""

    def __init__(self, t: FaultTree, node_budget: Optional[int] = None):
        self.tree = t
        modules = set(find_modules(t))
        modules.add(t.root)
        self._plan = []
        for m in (v for v in t.post_order if v in modules):
            leaves = self._view_leaves(t, m, modules)
            leaf_variable = {v: i for i, v in enumerate(leaves)}
            bdd = _build_view(t, m, leaf_variable, range(len(leaves)), node_budget)
            sources = [('be', t.be_position(v)) if t.kind(v) is NodeKind.BE else ('module', v)
                       for v in leaves]
            self._plan.append((m, bdd, sources))
        logger.info("modular BDD engine: %d module(s), %d nodes in total", len(self._plan),
                    sum(bdd.node_count for _, bdd, _ in self._plan))

    @staticmethod
    def _view_leaves(t: FaultTree, m: int, modules: set) -> list:
        """Variables of module m in first-DFS-visit order"""
        seen = set()
        leaves = []
        stack = [m]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            if t.kind(v) is NodeKind.BE or (v != m and v in modules):
                leaves.append(v)
            else:
                stack.extend(reversed(t.children[v]))
        return leaves

    @property
    def modules(self) -> list:
        return [m for m, _, _ in self._plan]

    def __call__(self, p):
        p = as_prob_vector(self.tree, p)
        rows = p.tolist() if p.ndim == 1 else list(p)
        solved = {}
        for m, bdd, sources in self._plan:
            values = [rows[i] if kind == 'be' else solved[i] for kind, i in sources]
            solved[m] = _bdd_probability(bdd, values)
        result = solved[self.tree.root]
        if p.ndim == 1:
            return float(result)
        return np.broadcast_to(np.asarray(result, dtype=float), (p.shape[1],)).copy()


# === Engine selection ===

class BruteForceEngine:
    """Exhaustive cut-set enumeration, capped"""

    def __init__(self, t: FaultTree, cap: Optional[int] = None):
        require_valid(t)
        _check_cap(t, cap)
        self.tree = t
        self.cap = cap

    def __call__(self, p):
        return unreliability_bruteforce(self.tree, p, self.cap)


def select_engine(t: FaultTree) -> EngineChoice:
    """Bottom-up for trees, BDD for DAGs"""
    return EngineChoice.BOTTOM_UP if is_tree_structured(t) else EngineChoice.BDD


def compile_engine(t: FaultTree, choice=None, modularize: bool = False,
                   node_budget: Optional[int] = None, cap: Optional[int] = None):
    """Reusable crisp evaluator p -> U_T(p)"""
    require_valid(t)
    choice = select_engine(t) if choice is None else EngineChoice(choice)
    logger.info("engine %s for %r", choice.value, t)
    if choice is EngineChoice.BOTTOM_UP:
        return BottomUpEngine(t)
    if choice is EngineChoice.BDD:
        if modularize:
            return ModularBddEngine(t, node_budget)
        return BddEngine(t, node_budget=node_budget)
    return BruteForceEngine(t, cap)
