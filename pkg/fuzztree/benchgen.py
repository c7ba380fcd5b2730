"""
Synthetic benchmark fault trees

- horizontal / vertical combination of two fault trees
- seeded growth of large tree- or DAG-structured fault trees from a base pool
- fuzzification of crisp basic-event probabilities
"""
import logging
import math
import random
from enum import Enum
from typing import List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import NotABasicEventError, ProbabilityRangeError, ShapeError
from .ft_model import FaultTree, NodeKind, ProbabilisticFaultTree, require_valid
from .fuzzy_core import Interval, Trapezoidal, Triangular, TruncGaussian
from .fuzzy_unreliability import FuzzyProbVector

logger = logging.getLogger(__name__)

# Node counts of the default base pool members
POOL_SIZES = (10, 11, 17, 22, 31, 35, 39, 42, 45, 50)
POOL_PROB_RANGE = (1e-4, 1e-1)
GATES = (NodeKind.AND, NodeKind.OR)


class FuzzShape(str, Enum):
    TRIANGULAR = "triangular"
    TRAPEZOIDAL = "trapezoidal"
    GAUSSIAN = "trunc-gaussian"
    MIXED = "mixed"


class GenConfig(BaseModel):
    """Generator settings; identical configs give identical trees"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    seed: int = 0
    target_size: int = Field(..., ge=1, description="Minimum node count of the result")
    base_pool: Optional[List[ProbabilisticFaultTree]] = None
    combine_bias: float = Field(0.5, ge=0.0, le=1.0, description="Probability of a horizontal step")
    dag: bool = False
    dag_sharing: float = Field(0.0, ge=0.0, le=1.0)
    fuzz_shape: FuzzShape = FuzzShape.TRIANGULAR
    fuzz_spread: float = Field(0.2, ge=0.0, le=1.0)

    @field_validator('base_pool')
    @classmethod
    def validate_pool(cls, v):
        if v is None:
            return v
        if not v:
            raise ValueError("base_pool must not be empty")
        pool = []
        for member in v:
            tree, probs = member
            require_valid(tree)
            if len(probs) != tree.n_basic_events:
                raise ValueError(
                    f"pool member has {len(probs)} probabilities for {tree.n_basic_events} basic events")
            pool.append(ProbabilisticFaultTree(tree, tuple(float(x) for x in probs)))
        return pool


# === Combination of two fault trees ===

def _check_pair(t1: FaultTree, t2: FaultTree):
    require_valid(t1)
    require_valid(t2)


def horizontal_combine(t1: FaultTree, t2: FaultTree, gate) -> FaultTree:
    """New root of kind `gate` over the roots of t1 and t2.

    Nodes of t1 keep their ids, t2 follows, the new root comes last; the
    basic-event order is t1's then t2's, so probability vectors concatenate.
    """
    _check_pair(t1, t2)
    gate = NodeKind(gate)
    if gate is NodeKind.BE:
        raise ValueError("horizontal combination needs an AND or OR gate")
    offset = t1.node_count
    kinds = list(t1.kinds) + list(t2.kinds) + [gate]
    children = [list(kids) for kids in t1.children]
    children += [[w + offset for w in kids] for kids in t2.children]
    children.append([t1.root, t2.root + offset])
    return FaultTree(kinds, children, len(kinds) - 1)


def vertical_combine(t1: FaultTree, t2: FaultTree, at: int) -> FaultTree:
    """t1 with basic event `at` replaced by the root of t2.

    Node ids of t1 above `at` shift down by one, t2 follows; the basic-event
    order is t1's without `at`, then t2's.
    """
    _check_pair(t1, t2)
    if not 0 <= at < t1.node_count or t1.kind(at) is not NodeKind.BE:
        raise NotABasicEventError(f"node {at} is not a basic event of the first tree")

    def remap(w):
        return w if w < at else w - 1

    offset = t1.node_count - 1
    t2_root = t2.root + offset
    kinds, children = [], []
    for v in range(t1.node_count):
        if v == at:
            continue
        kinds.append(t1.kind(v))
        children.append([t2_root if w == at else remap(w) for w in t1.children[v]])
    kinds += list(t2.kinds)
    children += [[w + offset for w in kids] for kids in t2.children]
    root = t2_root if t1.root == at else remap(t1.root)
    return FaultTree(kinds, children, root)


# === Growth ===

def _compact(kinds, children, root, prob) -> ProbabilisticFaultTree:
    """Renumber the nodes reachable from root in DFS preorder; names G<i>/BE<i>"""
    new_id = {}
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        if v in new_id:
            continue
        new_id[v] = len(order)
        order.append(v)
        for w in reversed(children[v]):
            if w not in new_id:
                stack.append(w)

    names, probs = [], []
    n_gates = n_events = 0
    for v in order:
        if kinds[v] is NodeKind.BE:
            names.append(f"BE{n_events}")
            n_events += 1
            probs.append(prob[v])
        else:
            names.append(f"G{n_gates}")
            n_gates += 1
    tree = FaultTree([kinds[v] for v in order],
                     [[new_id[w] for w in children[v]] for v in order], 0, names)
    return ProbabilisticFaultTree(tree, tuple(probs))


class _GrowingTree:
    """Mutable node lists that grow by pool copies in amortized O(copy size)"""

    def __init__(self):
        self.kinds = []
        self.children = []
        self.parents = []
        self.prob = []
        self.events = []
        self._event_slot = {}
        self.root = None
        self.size = 0

    def _add_node(self, kind, prob=None) -> int:
        v = len(self.kinds)
        self.kinds.append(kind)
        self.children.append([])
        self.parents.append([])
        self.prob.append(prob)
        if kind is NodeKind.BE:
            self._event_slot[v] = len(self.events)
            self.events.append(v)
        self.size += 1
        return v

    def _drop_event(self, v):
        slot = self._event_slot.pop(v)
        last = self.events.pop()
        if last != v:
            self.events[slot] = last
            self._event_slot[last] = slot

    def add_copy(self, member: ProbabilisticFaultTree) -> tuple:
        tree, probs = member
        start = len(self.kinds)
        for v in range(tree.node_count):
            kind = tree.kind(v)
            p = probs[tree.be_position(v)] if kind is NodeKind.BE else None
            self._add_node(kind, p)
        for v, kids in enumerate(tree.children):
            for w in kids:
                self.children[start + v].append(start + w)
                self.parents[start + w].append(start + v)
        return start, start + tree.root

    def add_gate(self, kind, kids) -> int:
        g = self._add_node(kind)
        for w in kids:
            self.children[g].append(w)
            self.parents[w].append(g)
        return g

    def replace(self, x: int, w: int):
        """Point every edge into basic event x at node w instead"""
        for p in self.parents[x]:
            self.children[p] = [w if c == x else c for c in self.children[p]]
            self.parents[w].append(p)
        if x == self.root:
            self.root = w
        self.parents[x] = []
        self._drop_event(x)
        self.size -= 1

    def random_event(self, rng: random.Random, below: int) -> Optional[int]:
        """A basic event with id < below, or None"""
        for _ in range(32):
            v = self.events[rng.randrange(len(self.events))]
            if v < below:
                return v
        candidates = sorted(v for v in self.events if v < below)
        return rng.choice(candidates) if candidates else None

    def finish(self) -> ProbabilisticFaultTree:
        return _compact(self.kinds, self.children, self.root, self.prob)


def generate(cfg: GenConfig) -> ProbabilisticFaultTree:
    """Combine pool copies until the tree has at least cfg.target_size nodes.

    In DAG mode each combination step, with probability dag_sharing, also
    redirects one earlier basic event to a node of the fresh copy, which
    gives that node a second parent.
    """
    rng = random.Random(cfg.seed)
    pool = cfg.base_pool or default_base_pool()
    acc = _GrowingTree()
    _, acc.root = acc.add_copy(rng.choice(pool))
    steps = 0
    while acc.size < cfg.target_size:
        member = rng.choice(pool)
        copy_size = member.tree.node_count
        horizontal = rng.random() < cfg.combine_bias or copy_size == 1
        start, copy_root = acc.add_copy(member)
        if horizontal:
            acc.root = acc.add_gate(rng.choice(GATES), [acc.root, copy_root])
            growth = copy_size + 1
        else:
            acc.replace(acc.random_event(rng, start), copy_root)
            growth = copy_size - 1
        if cfg.dag and growth > 1 and rng.random() < cfg.dag_sharing:
            _share(acc, rng, start, copy_size)
        steps += 1
    logger.debug("generated %d nodes in %d combination steps (seed %d)", acc.size, steps, cfg.seed)
    return acc.finish()


def _share(acc: _GrowingTree, rng: random.Random, start: int, copy_size: int):
    x = acc.random_event(rng, start)
    if x is None or x == acc.root:
        return
    w = start + rng.randrange(copy_size)
    if any(w in acc.children[p] for p in acc.parents[x]):
        return
    # every edge out of the fresh copy stays inside it, so w cannot reach x's parents
    acc.replace(x, w)


def _random_probability(rng: random.Random) -> float:
    lo, hi = POOL_PROB_RANGE
    return 10 ** rng.uniform(math.log10(lo), math.log10(hi))


def random_pool_tree(rng: random.Random, n_nodes: int) -> ProbabilisticFaultTree:
    """Tree-structured FT with exactly n_nodes nodes, log-uniform BE probabilities"""
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be positive, got {n_nodes}")
    kinds = [NodeKind.BE]
    children = [[]]
    leaves = [0]
    gates = []
    while len(kinds) < n_nodes:
        remaining = n_nodes - len(kinds)
        if gates and (remaining == 1 or rng.random() < 0.5):
            g = rng.choice(gates)
            children[g].append(len(kinds))
            leaves.append(len(kinds))
            kinds.append(NodeKind.BE)
            children.append([])
            continue
        i = rng.randrange(len(leaves))
        leaf = leaves[i]
        leaves[i] = leaves[-1]
        leaves.pop()
        kinds[leaf] = rng.choice(GATES)
        gates.append(leaf)
        for _ in range(min(2, remaining)):
            children[leaf].append(len(kinds))
            leaves.append(len(kinds))
            kinds.append(NodeKind.BE)
            children.append([])
    prob = [_random_probability(rng) if k is NodeKind.BE else None for k in kinds]
    return _compact(kinds, children, 0, prob)


def default_base_pool(seed: int = 0) -> list:
    """Ten pool trees sized like the classic literature benchmark set"""
    return [random_pool_tree(random.Random(seed + i), size) for i, size in enumerate(POOL_SIZES)]


def random_fault_tree(rng: random.Random, n_basic_events: int, sharing: float = 0.0) -> ProbabilisticFaultTree:
    """Small random FT with uniform probabilities; tree-structured when sharing is 0"""
    if n_basic_events < 1:
        raise ValueError(f"n_basic_events must be positive, got {n_basic_events}")
    kinds = [NodeKind.BE] * n_basic_events
    children = [[] for _ in range(n_basic_events)]
    prob = [rng.random() for _ in range(n_basic_events)]
    roots = list(range(n_basic_events))
    consumed = []
    while len(roots) > 1:
        k = min(len(roots), rng.choice((2, 3)))
        picked = [roots.pop(rng.randrange(len(roots))) for _ in range(k)]
        kids = list(picked)
        if consumed and rng.random() < sharing:
            extra = rng.choice(consumed)
            if extra not in kids:
                kids.append(extra)
        # edges always point to lower ids, so the result is acyclic
        g = len(kinds)
        kinds.append(rng.choice(GATES))
        children.append(kids)
        prob.append(None)
        consumed.extend(picked)
        roots.append(g)
    return _compact(kinds, children, roots[0], prob)


# === Fuzzification ===

def fuzzify_shapes(p: Sequence[float], shape=FuzzShape.TRIANGULAR, spread: float = 0.2,
                   rng: Optional[random.Random] = None) -> list:
    """Shapes centred at each p_b with relative half-width `spread`, clamped to [0, 1]"""
    shape = FuzzShape(shape)
    if not 0.0 <= spread <= 1.0:
        raise ShapeError(f"spread must lie in [0, 1], got {spread}")
    rng = rng or random.Random(0)
    shapes = []
    clamped = 0
    for x in p:
        x = float(x)
        if not 0.0 <= x <= 1.0:
            raise ProbabilityRangeError(f"probability {x} lies outside [0, 1]")
        if x * spread == 0.0:
            shapes.append(Interval(a=x, b=x))
            continue
        kind = shape
        if kind is FuzzShape.MIXED:
            kind = rng.choice((FuzzShape.TRIANGULAR, FuzzShape.TRAPEZOIDAL, FuzzShape.GAUSSIAN))
        lo, hi = (1.0 - spread) * x, (1.0 + spread) * x
        if hi > 1.0:
            clamped += 1
            hi = 1.0
        if kind is FuzzShape.TRIANGULAR:
            shapes.append(Triangular(a=lo, b=x, d=hi))
        elif kind is FuzzShape.TRAPEZOIDAL:
            half = spread * x / 2
            shapes.append(Trapezoidal(a=lo, b=x - half, c=min(x + half, hi), d=hi))
        else:
            shapes.append(TruncGaussian(m=x, s=spread * x / 3, lo=0.0, hi=1.0))
    if clamped:
        logger.debug("clamped %d fuzzified supports to [0, 1]", clamped)
    return shapes


def fuzzify(p: Sequence[float], shape=FuzzShape.TRIANGULAR, spread: float = 0.2,
            n_cuts: int = 10, rng: Optional[random.Random] = None):
    """Discretized fuzzy probabilities centred at p"""
    return FuzzyProbVector.from_shapes(fuzzify_shapes(p, shape, spread, rng), n_cuts)
