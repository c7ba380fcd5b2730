"""
Regular fuzzy numbers in the alpha-cut representation

A regular fuzzy number is stored as N nested closed intervals, one per level
alpha_k = k/N (k = 1..N). Level 0 is never stored; the level-1/N cut stands in
for the support. Arithmetic follows the Zadeh extension evaluated at the cut
endpoints, which is exact for functions that are monotone in every coordinate.
"""
import inspect
import itertools
import logging
import math
from enum import Enum
from numbers import Real
from typing import Annotated, Callable, Iterable, Literal, Mapping, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import (
    ArityError, GridMismatchError, NestednessError, ProbabilityRangeError, ShapeError,
)

logger = logging.getLogger(__name__)

# Largest round-off inversion that is repaired instead of rejected
NESTING_TOL = 1e-12


# === Shape specifications ===

class _Shape(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    @model_validator(mode='after')
    def _check_invariants(self):
        problem = shape_violation(self)
        if problem:
            raise ValueError(problem)
        return self


class Triangular(_Shape):
    """Triangular fuzzy number, support [a, d], apex b"""
    kind: Literal['tri'] = 'tri'
    a: float
    b: float
    d: float


class Trapezoidal(_Shape):
    """Trapezoidal fuzzy number, support [a, d], plateau [b, c]"""
    kind: Literal['trap'] = 'trap'
    a: float
    b: float
    c: float
    d: float


class Interval(_Shape):
    """Indicator of [a, b]; the imprecise-probability case"""
    kind: Literal['interval'] = 'interval'
    a: float
    b: float


class TruncGaussian(_Shape):
    """Gaussian membership exp(-(x-m)^2 / 2s^2), cut to [lo, hi]"""
    kind: Literal['gauss'] = 'gauss'
    m: float
    s: float
    lo: float = 0.0
    hi: float = 1.0


ShapeSpec = Annotated[
    Union[Triangular, Trapezoidal, Interval, TruncGaussian],
    Field(discriminator='kind'),
]

SHAPE_TYPES = {
    'tri': Triangular,
    'trap': Trapezoidal,
    'interval': Interval,
    'gauss': TruncGaussian,
}


def shape_violation(shape) -> str:
    """Return a description of the violated invariant, or '' if the shape is valid"""
    if isinstance(shape, Triangular):
        if not shape.a <= shape.b <= shape.d:
            return f"triangular needs a <= b <= d, got ({shape.a}, {shape.b}, {shape.d})"
    elif isinstance(shape, Trapezoidal):
        if not shape.a <= shape.b <= shape.c <= shape.d:
            return (f"trapezoidal needs a <= b <= c <= d, "
                    f"got ({shape.a}, {shape.b}, {shape.c}, {shape.d})")
    elif isinstance(shape, Interval):
        if not shape.a <= shape.b:
            return f"interval needs a <= b, got ({shape.a}, {shape.b})"
    elif isinstance(shape, TruncGaussian):
        if not shape.s > 0:
            return f"gaussian needs s > 0, got {shape.s}"
        if not shape.lo < shape.hi:
            return f"gaussian truncation needs lo < hi, got [{shape.lo}, {shape.hi}]"
        if not shape.lo <= shape.m <= shape.hi:
            return f"gaussian mean {shape.m} lies outside its truncation [{shape.lo}, {shape.hi}]"
    else:
        return f"unknown shape type {type(shape).__name__}"
    return ''


def make_shape(kind: str, *params: float):
    """Build a ShapeSpec from its kind tag and positional parameters"""
    try:
        cls = SHAPE_TYPES[kind]
    except KeyError:
        raise ShapeError(f"unknown shape kind '{kind}'") from None
    names = [name for name in cls.model_fields if name != 'kind']
    required = [name for name in names if cls.model_fields[name].is_required()]
    if not len(required) <= len(params) <= len(names):
        raise ShapeError(f"shape '{kind}' takes {len(required)}"
                         + (f"-{len(names)}" if len(names) != len(required) else '')
                         + f" parameters, got {len(params)}")
    if not all(math.isfinite(v) for v in params):
        raise ShapeError(f"shape '{kind}' parameters must be finite")
    values = {name: float(v) for name, v in zip(names, params)}
    problem = shape_violation(cls.model_construct(**values))
    if problem:
        raise ShapeError(problem)
    return cls(**values)


def shape_parameters(shape) -> tuple:
    """Positional parameters of a shape, in declaration order"""
    return tuple(getattr(shape, name) for name in type(shape).model_fields if name != 'kind')


def check_probability_shape(shape):
    """Raise ProbabilityRangeError unless every parameter lies in [0, 1]"""
    for value in shape_parameters(shape):
        if not 0.0 <= value <= 1.0:
            raise ProbabilityRangeError(
                f"{shape.kind} parameter {value} lies outside [0, 1]")


def shape_center(shape) -> float:
    """Point of full membership used as the crisp value of a shape"""
    if isinstance(shape, Triangular):
        return shape.b
    if isinstance(shape, Trapezoidal):
        return (shape.b + shape.c) / 2
    if isinstance(shape, Interval):
        return (shape.a + shape.b) / 2
    return shape.m


def shape_membership(shape, x: float) -> float:
    """Exact membership degree of x under a shape"""
    if isinstance(shape, Interval):
        return 1.0 if shape.a <= x <= shape.b else 0.0
    if isinstance(shape, TruncGaussian):
        if not shape.lo <= x <= shape.hi:
            return 0.0
        return math.exp(-((x - shape.m) ** 2) / (2 * shape.s ** 2))
    if isinstance(shape, Triangular):
        a, b, c, d = shape.a, shape.b, shape.b, shape.d
    else:
        a, b, c, d = shape.a, shape.b, shape.c, shape.d
    if b <= x <= c:
        return 1.0
    if a < x < b:
        return (x - a) / (b - a)
    if c < x < d:
        return (d - x) / (d - c)
    return 0.0


def alpha_grid(n_cuts: int) -> np.ndarray:
    """Levels k/N for k = 1..N"""
    if isinstance(n_cuts, bool) or not isinstance(n_cuts, (int, np.integer)) or n_cuts < 1:
        raise ShapeError(f"n_cuts must be a positive integer, got {n_cuts!r}")
    return np.arange(1, n_cuts + 1, dtype=float) / n_cuts


def discretize(shape, n_cuts: int) -> 'AlphaFuzzy':
    """Exact alpha-cuts of a shape at the levels k/N"""
    alpha = alpha_grid(n_cuts)
    problem = shape_violation(shape)
    if problem:
        raise ShapeError(problem)

    if isinstance(shape, Interval):
        lo = np.full(n_cuts, shape.a)
        hi = np.full(n_cuts, shape.b)
    elif isinstance(shape, TruncGaussian):
        width = shape.s * np.sqrt(-2.0 * np.log(alpha))
        lo = np.maximum(shape.m - width, shape.lo)
        hi = np.minimum(shape.m + width, shape.hi)
    else:
        if isinstance(shape, Triangular):
            a, b, c, d = shape.a, shape.b, shape.b, shape.d
        else:
            a, b, c, d = shape.a, shape.b, shape.c, shape.d
        # trap cut: [(b - a) * alpha + a, d - (d - c) * alpha]
        lo = np.clip((b - a) * alpha + a, a, b)
        hi = np.clip(d - (d - c) * alpha, c, d)
        lo[-1], hi[-1] = b, c
    return AlphaFuzzy(lo, hi)


# === Alpha-cut fuzzy numbers ===

def _repair_nesting(lo: np.ndarray, hi: np.ndarray, tol: float):
    inverted = lo - hi
    if inverted.max() > tol:
        k = int(inverted.argmax())
        raise NestednessError(f"cut {k + 1} is inverted: [{lo[k]}, {hi[k]}]")
    if inverted.max() > 0:
        mask = inverted > 0
        mid = (lo[mask] + hi[mask]) / 2
        lo[mask] = mid
        hi[mask] = mid
        logger.debug("snapped %d inverted cut(s) to their midpoint", int(mask.sum()))

    if lo.size > 1:
        drop_lo = lo[:-1] - lo[1:]
        rise_hi = hi[1:] - hi[:-1]
        worst = max(drop_lo.max(), rise_hi.max())
        if worst > tol:
            raise NestednessError(f"alpha-cuts are not nested (violation {worst:.3g})")
        if worst > 0:
            lo = np.maximum.accumulate(lo)
            hi = np.minimum.accumulate(hi)
            # accumulate can re-invert a snapped level by one ulp
            hi = np.maximum(hi, lo)
            logger.debug("repaired nesting round-off of %.3g", worst)
    return lo, hi


class AlphaFuzzy:
    """Regular fuzzy number as N nested alpha-cuts (immutable)"""

    __slots__ = ('_lo', '_hi')

    def __init__(self, lo, hi, tol: float = NESTING_TOL):
        lo = np.array(lo, dtype=float).reshape(-1)
        hi = np.array(hi, dtype=float).reshape(-1)
        if lo.shape != hi.shape:
            raise GridMismatchError(f"{lo.size} lower vs {hi.size} upper endpoints")
        if lo.size == 0:
            raise ShapeError("a fuzzy number needs at least one alpha-cut")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise NestednessError("alpha-cut endpoints must be finite")
        lo, hi = _repair_nesting(lo, hi, tol)
        lo.setflags(write=False)
        hi.setflags(write=False)
        self._lo = lo
        self._hi = hi

    @classmethod
    def crisp(cls, value: float, n_cuts: int) -> 'AlphaFuzzy':
        """Degenerate fuzzy number with zero-width cuts"""
        alpha_grid(n_cuts)
        return cls(np.full(n_cuts, float(value)), np.full(n_cuts, float(value)))

    @property
    def n_cuts(self) -> int:
        return self._lo.size

    @property
    def alpha(self) -> np.ndarray:
        return alpha_grid(self.n_cuts)

    @property
    def lo(self) -> np.ndarray:
        return self._lo

    @property
    def hi(self) -> np.ndarray:
        return self._hi

    @property
    def cuts(self) -> list:
        """(alpha_k, lo_k, hi_k) triples, lowest level first"""
        return list(zip(self.alpha.tolist(), self._lo.tolist(), self._hi.tolist()))

    def cut(self, k: int) -> tuple:
        """Interval at level index k (0-based, level (k+1)/N)"""
        return float(self._lo[k]), float(self._hi[k])

    def cut_at(self, alpha: float) -> tuple:
        """Cut of the smallest stored level >= alpha"""
        if not 0.0 < alpha <= 1.0:
            raise ShapeError(f"alpha must lie in (0, 1], got {alpha}")
        k = min(self.n_cuts - 1, max(0, math.ceil(alpha * self.n_cuts - 1e-9) - 1))
        return self.cut(k)

    @property
    def support(self) -> tuple:
        return self.cut(0)

    @property
    def core(self) -> tuple:
        return self.cut(self.n_cuts - 1)

    @property
    def is_crisp(self) -> bool:
        return bool(np.all(self._lo == self._hi)) and bool(np.all(self._lo == self._lo[0]))

    def membership_at(self, x: float) -> float:
        return membership_at(self, x)

    def allclose(self, other: 'AlphaFuzzy', tol: float = 1e-12) -> bool:
        return (self.n_cuts == other.n_cuts
                and bool(np.allclose(self._lo, other.lo, rtol=0, atol=tol))
                and bool(np.allclose(self._hi, other.hi, rtol=0, atol=tol)))

    def __len__(self):
        return self.n_cuts

    def __iter__(self):
        return iter(self.cuts)

    def __eq__(self, other):
        if not isinstance(other, AlphaFuzzy):
            return NotImplemented
        return (self.n_cuts == other.n_cuts
                and bool(np.array_equal(self._lo, other.lo))
                and bool(np.array_equal(self._hi, other.hi)))

    def __hash__(self):
        return hash((self._lo.tobytes(), self._hi.tobytes()))

    def __repr__(self):
        return f"AlphaFuzzy(n_cuts={self.n_cuts}, support={self.support}, core={self.core})"

    # arithmetic

    def _coerce(self, other) -> 'AlphaFuzzy':
        if isinstance(other, AlphaFuzzy):
            return other
        if isinstance(other, Real):
            return AlphaFuzzy.crisp(float(other), self.n_cuts)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return zadeh_endpoint_map(np.add, (Monotone.NONDECREASING,) * 2, (self, other))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return zadeh_endpoint_map(
            np.subtract, (Monotone.NONDECREASING, Monotone.NONINCREASING), (self, other))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other.__sub__(self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        _check_grid((self, other))
        # the product is monotone per coordinate once signs are fixed; the
        # four corners cover every sign combination
        corners = np.stack([self._lo * other.lo, self._lo * other.hi,
                            self._hi * other.lo, self._hi * other.hi])
        return AlphaFuzzy(corners.min(axis=0), corners.max(axis=0))

    __rmul__ = __mul__

    def __neg__(self):
        return AlphaFuzzy(-self._hi, -self._lo)

    def complement(self) -> 'AlphaFuzzy':
        """1 - x"""
        return zadeh_endpoint_map(lambda x: 1.0 - x, (Monotone.NONINCREASING,), (self,))


def membership_at(f: AlphaFuzzy, x: float) -> float:
    """Step-function membership: the highest stored level whose cut contains x"""
    inside = (f.lo <= x) & (x <= f.hi)
    if not inside.any():
        return 0.0
    # cuts are nested, so the highest containing level is the last True
    k = int(np.flatnonzero(inside)[-1])
    return float((k + 1) / f.n_cuts)


def clamp_unit(values: np.ndarray, context: str = 'value') -> np.ndarray:
    """Clamp probabilities into [0, 1], logging any change"""
    values = np.asarray(values, dtype=float)
    excess = max(float(np.max(values - 1.0, initial=0.0)), float(np.max(-values, initial=0.0)))
    if excess > 0:
        log = logger.warning if excess > NESTING_TOL else logger.debug
        log("clamped %s into [0, 1] (excess %.3g)", context, excess)
        values = np.clip(values, 0.0, 1.0)
    return values


# === Zadeh extension at the endpoints ===

class Monotone(str, Enum):
    """Monotonicity direction of a function in one coordinate"""
    NONDECREASING = "nondecreasing"
    NONINCREASING = "nonincreasing"


def _check_grid(args: Sequence[AlphaFuzzy]):
    sizes = {a.n_cuts for a in args}
    if len(sizes) > 1:
        raise GridMismatchError(f"arguments use different alpha grids: {sorted(sizes)} cuts")


def zadeh_endpoint_map(f: Callable, directions: Sequence, args: Sequence[AlphaFuzzy]) -> AlphaFuzzy:
    """Zadeh extension of a coordinate-wise monotone f, evaluated at cut endpoints.

    f is called twice with one numpy array per argument (all levels at once)
    and must act elementwise. For each level the left endpoint of the result is
    f at the vector picking lo for nondecreasing and hi for nonincreasing
    coordinates; the right endpoint uses the opposite picks.
    """
    args = list(args)
    directions = [Monotone(d) for d in directions]
    if not args:
        raise ArityError("zadeh_endpoint_map needs at least one argument")
    if len(directions) != len(args):
        raise ArityError(f"{len(directions)} directions for {len(args)} arguments")
    _check_grid(args)

    left = [a.lo if d is Monotone.NONDECREASING else a.hi for a, d in zip(args, directions)]
    right = [a.hi if d is Monotone.NONDECREASING else a.lo for a, d in zip(args, directions)]
    shape = (args[0].n_cuts,)
    lo = np.broadcast_to(np.asarray(f(*left), dtype=float), shape)
    hi = np.broadcast_to(np.asarray(f(*right), dtype=float), shape)
    return AlphaFuzzy(lo, hi)


# === Discrete fuzzy numbers (oracle use) ===

class DiscreteFuzzy:
    """Finite fuzzy set {x_1 -> a_1, ..., x_n -> a_n} over the reals"""

    __slots__ = ('_support',)

    def __init__(self, support: Mapping[float, float]):
        items = {}
        for value, degree in dict(support).items():
            value, degree = float(value), float(degree)
            if not math.isfinite(value):
                raise ShapeError(f"support point {value} is not finite")
            if not 0.0 < degree <= 1.0:
                raise ShapeError(f"membership degree {degree} of {value} lies outside (0, 1]")
            items[value] = degree
        self._support = dict(sorted(items.items()))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> 'DiscreteFuzzy':
        """Build from (value, degree) pairs, keeping the max degree per value"""
        merged = {}
        for value, degree in pairs:
            value = float(value)
            if degree > merged.get(value, 0.0):
                merged[value] = degree
        return cls(merged)

    @property
    def support(self) -> dict:
        return dict(self._support)

    def items(self):
        return self._support.items()

    def degree(self, x: float) -> float:
        return self._support.get(float(x), 0.0)

    @property
    def is_normalized(self) -> bool:
        return any(d == 1.0 for d in self._support.values())

    def alpha_cut(self, alpha: float) -> tuple:
        """(min, max) of the support points with degree >= alpha, or None"""
        values = [x for x, d in self._support.items() if d >= alpha]
        if not values:
            return None
        return min(values), max(values)

    def isclose(self, other: 'DiscreteFuzzy', tol: float = 1e-12) -> bool:
        """Same degrees on support points that agree within tol"""
        mine, theirs = list(self.items()), list(other.items())
        if len(mine) != len(theirs):
            return False
        return all(abs(x - y) <= tol and dx == dy for (x, dx), (y, dy) in zip(mine, theirs))

    def __len__(self):
        return len(self._support)

    def __eq__(self, other):
        if not isinstance(other, DiscreteFuzzy):
            return NotImplemented
        return self._support == other._support

    def __repr__(self):
        body = ', '.join(f"{x:g} -> {d:g}" for x, d in self._support.items())
        return f"DiscreteFuzzy({{{body}}})"


def _check_arity(f: Callable, n: int):
    try:
        signature = inspect.signature(f)
    except (TypeError, ValueError):
        return
    try:
        signature.bind(*([0.0] * n))
    except TypeError:
        raise ArityError(f"function does not accept {n} argument(s)") from None


def discrete_zadeh(f: Callable, args: Sequence[DiscreteFuzzy]) -> DiscreteFuzzy:
    """Exact sup-min extension of f by enumerating the product of supports"""
    args = list(args)
    if not args:
        raise ArityError("discrete_zadeh needs at least one argument")
    _check_arity(f, len(args))
    pairs = []
    for combo in itertools.product(*(list(a.items()) for a in args)):
        values = [x for x, _ in combo]
        degree = min(d for _, d in combo)
        pairs.append((f(*values), degree))
    return DiscreteFuzzy.from_pairs(pairs)


def shape_to_discrete(shape, n_cuts: int) -> DiscreteFuzzy:
    """Cut endpoints of a discretized shape, each carrying its level as degree"""
    fuzzy = discretize(shape, n_cuts)
    pairs = []
    for alpha, lo, hi in fuzzy.cuts:
        pairs.append((lo, alpha))
        pairs.append((hi, alpha))
    return DiscreteFuzzy.from_pairs(pairs)
