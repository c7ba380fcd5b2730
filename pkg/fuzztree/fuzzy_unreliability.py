"""
Fuzzy unreliability of fault trees

Any crisp engine is lifted to fuzzy inputs by evaluating it at the all-left and
all-right endpoint vectors of every alpha level (2N crisp runs). The discrete
sup-min oracle of the fuzzy unreliability is kept alongside for verification.
"""
import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .config import Settings, load_settings
from .engines import EngineChoice, compile_engine, select_engine
from .errors import (
    DimensionError, GridMismatchError, NestednessError, ProbabilityRangeError, SizeLimitError,
)
from .ft_model import FaultTree, require_valid, unreliability_bruteforce
from .fuzzy_core import (
    NESTING_TOL, AlphaFuzzy, DiscreteFuzzy, alpha_grid, check_probability_shape, clamp_unit,
    discretize,
)

logger = logging.getLogger(__name__)


class FuzzyProbVector:
    """One fuzzy probability per basic event, all on one alpha grid"""

    __slots__ = ('_entries',)

    def __init__(self, entries: Iterable[AlphaFuzzy]):
        entries = tuple(entries)
        if len({e.n_cuts for e in entries}) > 1:
            raise GridMismatchError(
                f"fuzzy probabilities use different alpha grids: {sorted({e.n_cuts for e in entries})}")
        for i, e in enumerate(entries):
            if e.lo[0] < 0.0 or e.hi[0] > 1.0:
                raise ProbabilityRangeError(
                    f"fuzzy probability {i} has support {e.support} outside [0, 1]")
        self._entries = entries

    @classmethod
    def crisp(cls, p: Sequence[float], n_cuts: int) -> 'FuzzyProbVector':
        return cls(AlphaFuzzy.crisp(x, n_cuts) for x in p)

    @classmethod
    def from_shapes(cls, shapes, n_cuts: int) -> 'FuzzyProbVector':
        entries = []
        for shape in shapes:
            check_probability_shape(shape)
            entries.append(discretize(shape, n_cuts))
        return cls(entries)

    @property
    def n_cuts(self) -> int:
        return self._entries[0].n_cuts if self._entries else 0

    @property
    def lower_matrix(self) -> np.ndarray:
        """(N, n): row k is the all-left endpoint vector of level k"""
        return np.column_stack([e.lo for e in self._entries])

    @property
    def upper_matrix(self) -> np.ndarray:
        return np.column_stack([e.hi for e in self._entries])

    def __len__(self):
        return len(self._entries)

    def __getitem__(self, i):
        return self._entries[i]

    def __iter__(self):
        return iter(self._entries)

    def __repr__(self):
        return f"FuzzyProbVector(events={len(self)}, n_cuts={self.n_cuts})"


class AnalysisResult(BaseModel):
    """Fuzzy unreliability as alpha-indexed interval endpoints plus provenance"""
    alpha: List[float]
    lower: List[float]
    upper: List[float]
    engine: EngineChoice
    n_cuts: int = Field(..., ge=1)
    modularized: bool = False
    endpoint_times_ms: List[List[float]] = Field(
        default_factory=list, description="Per level: [left run, right run] wall time")
    wall_time_ms: float = 0.0

    @model_validator(mode='after')
    def _check_cuts(self):
        n = self.n_cuts
        if not (len(self.alpha) == len(self.lower) == len(self.upper) == n):
            raise ValueError(f"alpha/lower/upper must all have {n} entries")
        if self.endpoint_times_ms and len(self.endpoint_times_ms) != n:
            raise ValueError(f"endpoint_times_ms must have {n} entries")
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        if np.any(lo > hi):
            raise ValueError("a level has lower > upper")
        if np.any(np.diff(lo) < 0) or np.any(np.diff(hi) > 0):
            raise ValueError("output cuts are not nested")
        if np.any(lo < 0.0) or np.any(hi > 1.0):
            raise ValueError("unreliability endpoints must lie in [0, 1]")
        return self

    def cut(self, k: int) -> tuple:
        return self.lower[k], self.upper[k]

    def as_alpha_fuzzy(self) -> AlphaFuzzy:
        return AlphaFuzzy(self.lower, self.upper)

    @property
    def crisp_value(self) -> Optional[float]:
        """Apex value when the level-1 cut is degenerate"""
        lo, hi = self.lower[-1], self.upper[-1]
        if lo == hi:
            return lo
        return None


def _snap_levels(lower: np.ndarray, upper: np.ndarray):
    inverted = lower - upper
    if inverted.max() > NESTING_TOL:
        k = int(inverted.argmax())
        raise NestednessError(
            f"level {k + 1}: lower {lower[k]!r} exceeds upper {upper[k]!r}; "
            "the engine is not monotone")
    mask = inverted > 0
    if mask.any():
        mid = (lower[mask] + upper[mask]) / 2
        lower[mask] = mid
        upper[mask] = mid
        logger.debug("snapped %d round-off inverted level(s)", int(mask.sum()))
    return lower, upper


class FuzzyUnreliabilityAnalyzer:
    """Endpoint fan-out of a crisp engine over every alpha level"""

    def __init__(self, tree: FaultTree, fp: FuzzyProbVector, engine=None,
                 modularize: bool = False, jobs: Optional[int] = None,
                 settings: Optional[Settings] = None):
        require_valid(tree)
        if not isinstance(fp, FuzzyProbVector):
            fp = FuzzyProbVector(fp)
        if len(fp) != tree.n_basic_events:
            raise DimensionError(
                f"{len(fp)} fuzzy probabilities for {tree.n_basic_events} basic events")
        self.tree = tree
        self.fp = fp
        self.engine = select_engine(tree) if engine is None else EngineChoice(engine)
        self.modularize = modularize
        self.settings = settings or load_settings()
        if jobs is not None:
            self.settings = self.settings.model_copy(update={'jobs': jobs})

    def analyze(self) -> AnalysisResult:
        started = time.perf_counter()
        evaluator = compile_engine(self.tree, self.engine, modularize=self.modularize,
                                   cap=self.settings.brute_force_cap)
        n_cuts = self.fp.n_cuts
        endpoints = (self.fp.lower_matrix, self.fp.upper_matrix)
        tasks = [(k, side) for k in range(n_cuts) for side in (0, 1)]

        def run(task):
            k, side = task
            t0 = time.perf_counter()
            value = evaluator(endpoints[side][k])
            return k, side, value, (time.perf_counter() - t0) * 1000.0

        workers = self.settings.resolve_jobs(len(tasks))
        if workers == 1:
            outcomes = list(map(run, tasks))
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(run, tasks))

        values = np.empty((n_cuts, 2))
        times = np.empty((n_cuts, 2))
        for k, side, value, elapsed in outcomes:
            values[k, side] = value
            times[k, side] = elapsed
        lower, upper = _snap_levels(values[:, 0].copy(), values[:, 1].copy())
        lower = clamp_unit(lower, 'lower unreliability endpoints')
        upper = clamp_unit(upper, 'upper unreliability endpoints')
        # nesting round-off is repaired the same way as for any alpha-cut number
        result_cuts = AlphaFuzzy(lower, upper)

        wall = (time.perf_counter() - started) * 1000.0
        logger.info("fuzzy unreliability: %d crisp runs on %d worker(s) in %.1f ms",
                    len(tasks), workers, wall)
        return AnalysisResult(
            alpha=alpha_grid(n_cuts).tolist(),
            lower=result_cuts.lo.tolist(),
            upper=result_cuts.hi.tolist(),
            engine=self.engine,
            n_cuts=n_cuts,
            modularized=self.modularize and self.engine is EngineChoice.BDD,
            endpoint_times_ms=times.tolist(),
            wall_time_ms=wall,
        )


def fuzzy_unreliability(t: FaultTree, fp, engine=None, jobs: Optional[int] = None,
                        modularize: bool = False, settings: Optional[Settings] = None) -> AnalysisResult:
    """Alpha-cuts of the fuzzy unreliability from 2N crisp engine runs"""
    return FuzzyUnreliabilityAnalyzer(t, fp, engine, modularize, jobs, settings).analyze()


def fuzzy_unreliability_discrete(t: FaultTree, fp, settings: Optional[Settings] = None) -> DiscreteFuzzy:
    """Exact sup-min fuzzy unreliability for finite-support fuzzy probabilities.

    fp maps basic-event names to DiscreteFuzzy, or lists them in basic-event order.
    """
    settings = settings or load_settings()
    require_valid(t)
    n = t.n_basic_events
    if n > settings.discrete_oracle_max_events:
        raise SizeLimitError(
            f"discrete oracle supports at most {settings.discrete_oracle_max_events} "
            f"basic events, tree has {n}")
    if isinstance(fp, Mapping):
        missing = [t.name(v) for v in t.basic_events if t.name(v) not in fp]
        if missing:
            raise DimensionError(f"no fuzzy probability for basic event(s): {', '.join(missing)}")
        entries = [fp[t.name(v)] for v in t.basic_events]
    else:
        entries = list(fp)
    if len(entries) != n:
        raise DimensionError(f"{len(entries)} fuzzy probabilities for {n} basic events")
    combinations = math.prod(len(e) for e in entries)
    if combinations > settings.discrete_oracle_cap:
        raise SizeLimitError(
            f"{combinations} support combinations exceed the cap of {settings.discrete_oracle_cap}")

    supports = [list(e.items()) for e in entries]
    pairs = []
    combos = itertools.product(*supports)
    chunk = 1 << 16
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            break
        probs = np.array([[x for x, _ in combo] for combo in block]).T
        degrees = [min(d for _, d in combo) for combo in block]
        values = unreliability_bruteforce(t, probs, cap=settings.discrete_oracle_max_events)
        pairs.extend(zip(values.tolist(), degrees))
    return DiscreteFuzzy.from_pairs(pairs)
