"""
Fault tree data model, structural validation, structure function
and the exact brute-force unreliability oracle
"""
import functools
import logging
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

import networkx as nx
import numpy as np
from pydantic import BaseModel

from .errors import DimensionError, InvalidFaultTreeError, ProbabilityRangeError, SizeLimitError

logger = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 20


class NodeKind(str, Enum):
    BE = "be"
    AND = "and"
    OR = "or"


class DiagnosticRule(str, Enum):
    CYCLE = "cycle"
    UNREACHABLE = "unreachable"
    MULTIPLE_ROOTS = "multiple_roots"
    GATE_WITHOUT_CHILDREN = "gate_without_children"
    BE_WITH_CHILDREN = "be_with_children"
    DUPLICATE_EDGE = "duplicate_edge"
    DANGLING_CHILD = "dangling_child"
    BAD_ROOT = "bad_root"
    UNDEFINED_NAME = "undefined_name"
    DUPLICATE_NAME = "duplicate_name"


class Diagnostic(BaseModel):
    """One violated structural rule"""
    rule: DiagnosticRule
    node: Optional[int] = None
    name: Optional[str] = None
    message: str


class FaultTree:
    """Rooted DAG of AND/OR gates over basic events (immutable).

    Nodes are dense integer ids; names live in a side table for diagnostics.
    Basic events are numbered by increasing node id, and that numbering is the
    index space of status and probability vectors.
    """

    def __init__(self, kinds: Sequence, children: Sequence[Sequence[int]], root: int,
                 names: Optional[Sequence[str]] = None):
        self._kinds = tuple(NodeKind(k) for k in kinds)
        self._children = tuple(tuple(int(w) for w in kids) for kids in children)
        self._root = int(root)
        if names is None:
            names = [f"n{v}" for v in range(len(self._kinds))]
        self._names = tuple(str(name) for name in names)
        if not (len(self._kinds) == len(self._children) == len(self._names)):
            raise InvalidFaultTreeError([Diagnostic(
                rule=DiagnosticRule.BAD_ROOT,
                message=(f"{len(self._kinds)} kinds, {len(self._children)} child lists "
                         f"and {len(self._names)} names do not line up"))])
        if not self._kinds:
            raise InvalidFaultTreeError([Diagnostic(
                rule=DiagnosticRule.BAD_ROOT, message="a fault tree needs at least one node")])

    @property
    def kinds(self) -> tuple:
        return self._kinds

    @property
    def children(self) -> tuple:
        return self._children

    @property
    def root(self) -> int:
        return self._root

    @property
    def names(self) -> tuple:
        return self._names

    @property
    def node_count(self) -> int:
        return len(self._kinds)

    def __len__(self):
        return len(self._kinds)

    def kind(self, v: int) -> NodeKind:
        return self._kinds[v]

    def name(self, v: int) -> str:
        return self._names[v]

    @cached_property
    def basic_events(self) -> tuple:
        """Node ids of the basic events, in status-vector order"""
        return tuple(v for v, k in enumerate(self._kinds) if k is NodeKind.BE)

    @property
    def n_basic_events(self) -> int:
        return len(self.basic_events)

    @cached_property
    def _be_positions(self) -> dict:
        return {v: i for i, v in enumerate(self.basic_events)}

    def be_position(self, v: int) -> int:
        return self._be_positions[v]

    @cached_property
    def name_index(self) -> dict:
        return {name: v for v, name in enumerate(self._names)}

    @cached_property
    def parents(self) -> tuple:
        parents = [[] for _ in self._kinds]
        for v, kids in enumerate(self._children):
            for w in kids:
                if 0 <= w < len(parents):
                    parents[w].append(v)
        return tuple(tuple(p) for p in parents)

    @cached_property
    def post_order(self) -> tuple:
        """Nodes reachable from the root, every child before its parents"""
        visited = bytearray(self.node_count)
        order = []
        visited[self._root] = 1
        stack = [(self._root, 0)]
        children = self._children
        while stack:
            v, i = stack[-1]
            kids = children[v]
            if i < len(kids):
                stack[-1] = (v, i + 1)
                w = kids[i]
                if 0 <= w < len(visited) and not visited[w]:
                    visited[w] = 1
                    stack.append((w, 0))
            else:
                stack.pop()
                order.append(v)
        return tuple(order)

    @cached_property
    def diagnostics(self) -> tuple:
        return tuple(_collect_diagnostics(self))

    @property
    def is_valid(self) -> bool:
        return not self.diagnostics

    def __repr__(self):
        return (f"FaultTree(nodes={self.node_count}, basic_events={self.n_basic_events}, "
                f"root={self._names[self._root]!r})")


class ProbabilisticFaultTree(NamedTuple):
    """A fault tree with one failure probability per basic event"""
    tree: FaultTree
    probs: tuple


# === Building ===

class FaultTreeBuilder:
    """Name-based construction; children may be referenced before they are defined"""

    def __init__(self):
        self._kinds = []
        self._child_names = []
        self._names = []
        self._index = {}

    def _add(self, name: str, kind: NodeKind, child_names) -> int:
        if name in self._index:
            raise InvalidFaultTreeError([Diagnostic(
                rule=DiagnosticRule.DUPLICATE_NAME, node=self._index[name], name=name,
                message=f"'{name}' is defined twice")])
        v = len(self._kinds)
        self._index[name] = v
        self._kinds.append(kind)
        self._child_names.append(list(child_names))
        self._names.append(name)
        return v

    def add_basic_event(self, name: str) -> int:
        return self._add(name, NodeKind.BE, ())

    def add_gate(self, name: str, kind, children: Sequence[str]) -> int:
        kind = NodeKind(kind)
        if kind is NodeKind.BE:
            raise ValueError("use add_basic_event for basic events")
        return self._add(name, kind, children)

    def __contains__(self, name):
        return name in self._index

    def build(self, root: str) -> FaultTree:
        diagnostics = []
        children = []
        for v, names in enumerate(self._child_names):
            kids = []
            for child in names:
                if child not in self._index:
                    diagnostics.append(Diagnostic(
                        rule=DiagnosticRule.UNDEFINED_NAME, node=v, name=child,
                        message=f"'{self._names[v]}' references undefined '{child}'"))
                else:
                    kids.append(self._index[child])
            children.append(kids)
        if root not in self._index:
            diagnostics.append(Diagnostic(
                rule=DiagnosticRule.UNDEFINED_NAME, name=root,
                message=f"top-level event '{root}' is not defined"))
        if diagnostics:
            raise InvalidFaultTreeError(diagnostics)
        return FaultTree(self._kinds, children, self._index[root], self._names)


# === Validation ===

def _collect_diagnostics(t: FaultTree) -> list:
    diagnostics = []
    n = t.node_count
    if not 0 <= t.root < n:
        return [Diagnostic(rule=DiagnosticRule.BAD_ROOT, node=t.root,
                           message=f"root id {t.root} is out of range")]

    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    for v, kids in enumerate(t.children):
        kind = t.kind(v)
        if kind is NodeKind.BE and kids:
            diagnostics.append(Diagnostic(
                rule=DiagnosticRule.BE_WITH_CHILDREN, node=v, name=t.name(v),
                message=f"basic event '{t.name(v)}' has children"))
        if kind is not NodeKind.BE and not kids:
            diagnostics.append(Diagnostic(
                rule=DiagnosticRule.GATE_WITHOUT_CHILDREN, node=v, name=t.name(v),
                message=f"{kind.value.upper()} gate '{t.name(v)}' has no children"))
        seen = set()
        for w in kids:
            if not 0 <= w < n:
                diagnostics.append(Diagnostic(
                    rule=DiagnosticRule.DANGLING_CHILD, node=v, name=t.name(v),
                    message=f"'{t.name(v)}' references missing node {w}"))
                continue
            if w in seen:
                diagnostics.append(Diagnostic(
                    rule=DiagnosticRule.DUPLICATE_EDGE, node=v, name=t.name(v),
                    message=f"edge '{t.name(v)}' -> '{t.name(w)}' is listed twice"))
                continue
            seen.add(w)
            graph.add_edge(v, w)

    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle:
        path = ' -> '.join(t.name(u) for u, _ in cycle) + f" -> {t.name(cycle[0][0])}"
        diagnostics.append(Diagnostic(
            rule=DiagnosticRule.CYCLE, node=cycle[0][0], name=t.name(cycle[0][0]),
            message=f"cycle detected: {path}"))

    reachable = nx.descendants(graph, t.root) | {t.root}
    for v in range(n):
        if v == t.root or v in reachable:
            continue
        if graph.in_degree(v) == 0:
            diagnostics.append(Diagnostic(
                rule=DiagnosticRule.MULTIPLE_ROOTS, node=v, name=t.name(v),
                message=f"'{t.name(v)}' has no parent but is not the root"))
        else:
            diagnostics.append(Diagnostic(
                rule=DiagnosticRule.UNREACHABLE, node=v, name=t.name(v),
                message=f"'{t.name(v)}' is unreachable from the root"))
    return diagnostics


def validate(t: FaultTree) -> list:
    """Diagnostics for every violated structural rule; empty means ok"""
    return list(t.diagnostics)


def require_valid(t: FaultTree) -> FaultTree:
    if t.diagnostics:
        raise InvalidFaultTreeError(t.diagnostics)
    return t


def is_tree_structured(t: FaultTree) -> bool:
    """True iff every non-root node has exactly one parent"""
    return all(len(p) == (0 if v == t.root else 1) for v, p in enumerate(t.parents))


# === Structure function ===

def as_status_vector(t: FaultTree, b) -> tuple:
    bits = tuple(int(x) for x in b)
    if len(bits) != t.n_basic_events:
        raise DimensionError(
            f"status vector has {len(bits)} entries, tree has {t.n_basic_events} basic events")
    return bits


def structure_eval(t: FaultTree, b) -> int:
    """S_T(root, b) by one memoized pass in post-order"""
    bits = as_status_vector(t, b)
    value = {}
    for v in t.post_order:
        kind = t.kind(v)
        if kind is NodeKind.BE:
            value[v] = bool(bits[t.be_position(v)])
        elif kind is NodeKind.AND:
            value[v] = all(value[w] for w in t.children[v])
        else:
            value[v] = any(value[w] for w in t.children[v])
    return int(value[t.root])


def status_matrix(n: int) -> np.ndarray:
    """All 2^n status vectors as rows, first basic event most significant"""
    rows = np.arange(2 ** n, dtype=np.int64)[:, None]
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((rows >> shifts) & 1).astype(bool)


def _check_cap(t: FaultTree, cap: Optional[int]):
    cap = BRUTE_FORCE_CAP if cap is None else cap
    if t.n_basic_events > cap:
        raise SizeLimitError(
            f"brute force over {t.n_basic_events} basic events exceeds the cap of {cap}")


@functools.lru_cache(maxsize=16)
def _cut_set_rows(t: FaultTree) -> np.ndarray:
    status = status_matrix(t.n_basic_events)
    value = {}
    for v in t.post_order:
        kind = t.kind(v)
        if kind is NodeKind.BE:
            value[v] = status[:, t.be_position(v)]
        elif kind is NodeKind.AND:
            value[v] = np.logical_and.reduce([value[w] for w in t.children[v]])
        else:
            value[v] = np.logical_or.reduce([value[w] for w in t.children[v]])
    rows = status[value[t.root]]
    rows.setflags(write=False)
    return rows


def cut_set_matrix(t: FaultTree, cap: Optional[int] = None) -> np.ndarray:
    """Every status vector with S_T(b) = 1, one boolean row each"""
    require_valid(t)
    _check_cap(t, cap)
    return _cut_set_rows(t)


def cut_sets(t: FaultTree, cap: Optional[int] = None) -> frozenset:
    """Exact enumeration {b : S_T(b) = 1}"""
    return frozenset(tuple(int(x) for x in row) for row in cut_set_matrix(t, cap))


def as_prob_vector(t: FaultTree, p) -> np.ndarray:
    """Probability vector (n,) or batch (n, K) checked against the tree"""
    p = np.asarray(p, dtype=float)
    if p.ndim not in (1, 2) or p.shape[0] != t.n_basic_events:
        raise DimensionError(
            f"probability vector of shape {p.shape} does not match "
            f"{t.n_basic_events} basic events")
    if not np.all((p >= 0.0) & (p <= 1.0)):
        bad = p[~((p >= 0.0) & (p <= 1.0))].reshape(-1)[0]
        raise ProbabilityRangeError(f"probability {bad} lies outside [0, 1]")
    return p


def unreliability_bruteforce(t: FaultTree, p, cap: Optional[int] = None):
    """U_T(p) as the sum over all cut sets of their path probabilities.

    p may be a batch of shape (n, K); a length-K array is returned then.
    """
    rows = cut_set_matrix(t, cap)
    p = as_prob_vector(t, p)
    if p.ndim == 1:
        return float(np.where(rows, p, 1.0 - p).prod(axis=1).sum())

    m, n = rows.shape
    out = np.empty(p.shape[1])
    chunk = max(1, (1 << 22) // max(1, m * n))
    for start in range(0, p.shape[1], chunk):
        block = p[:, start:start + chunk]
        terms = np.where(rows[:, :, None], block[None, :, :], 1.0 - block[None, :, :])
        out[start:start + chunk] = terms.prod(axis=1).sum(axis=0)
    return out
