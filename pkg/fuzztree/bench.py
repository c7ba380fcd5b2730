"""
Runtime experiments over generated fault trees
Tree mode: fuzzy bottom-up over growing tree sizes; DAG mode: BDD over random DAGs
"""
import logging
import math
import random
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from .benchgen import FuzzShape, GenConfig, default_base_pool, fuzzify, generate
from .engines import EngineChoice
from .fuzzy_unreliability import fuzzy_unreliability

logger = logging.getLogger(__name__)

GROUP_WIDTH = 80
# growth overshoots a target by ~18 nodes on average, so instances average ~239 nodes
DAG_SIZE_RANGE = (32, 410)
DAG_SHARING = 0.3
FLAT_TOL = 1e-20


class BenchMeasurement(BaseModel):
    """One analysed instance"""
    mode: str
    seed: int
    nodes: int
    basic_events: int
    engine: EngineChoice
    n_cuts: int
    time_s: float
    lower_support: float
    upper_support: float


class BenchGroup(BaseModel):
    group: int
    count: int
    nodes_mean: float
    time_mean_s: float
    time_std_s: float


class LinearFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


def measure_instance(cfg: GenConfig, mode: str, engine: EngineChoice, n_cuts: int = 10,
                     jobs: Optional[int] = None, pool=None) -> BenchMeasurement:
    """Generate, fuzzify and analyse one instance"""
    if pool is not None and cfg.base_pool is None:
        cfg = cfg.model_copy(update={'base_pool': pool})
    tree, probs = generate(cfg)
    fp = fuzzify(probs, cfg.fuzz_shape, cfg.fuzz_spread, n_cuts, rng=random.Random(cfg.seed))
    result = fuzzy_unreliability(tree, fp, engine=engine, jobs=jobs)
    return BenchMeasurement(
        mode=mode, seed=cfg.seed, nodes=tree.node_count, basic_events=tree.n_basic_events,
        engine=result.engine, n_cuts=n_cuts, time_s=result.wall_time_ms / 1000.0,
        lower_support=result.lower[0], upper_support=result.upper[0],
    )


def run_tree_bench(sizes: Sequence[int], count: int = 1, seed: int = 0, n_cuts: int = 10,
                   fuzz=FuzzShape.MIXED, spread: float = 0.2, jobs: Optional[int] = None) -> List[BenchMeasurement]:
    """`count` tree-structured instances per target size, analysed bottom-up"""
    pool = default_base_pool(seed)
    measurements = []
    for i, size in enumerate(sizes):
        for j in range(count):
            cfg = GenConfig(seed=seed + i * count + j, target_size=size,
                            fuzz_shape=fuzz, fuzz_spread=spread)
            m = measure_instance(cfg, 'tree', EngineChoice.BOTTOM_UP, n_cuts, jobs, pool)
            logger.info("tree bench: %d nodes in %.4f s", m.nodes, m.time_s)
            measurements.append(m)
    return measurements


def run_dag_bench(count: int = 125, seed: int = 0, n_cuts: int = 10, fuzz=FuzzShape.TRIANGULAR,
                  spread: float = 0.2, sharing: float = DAG_SHARING, size_range=DAG_SIZE_RANGE,
                  jobs: Optional[int] = None) -> List[BenchMeasurement]:
    """`count` DAG-structured instances with target sizes uniform in size_range, analysed by BDD"""
    pool = default_base_pool(seed)
    rng = random.Random(seed)
    measurements = []
    for j in range(count):
        cfg = GenConfig(seed=seed + j, target_size=rng.randint(*size_range), dag=True,
                        dag_sharing=sharing, fuzz_shape=fuzz, fuzz_spread=spread)
        m = measure_instance(cfg, 'dag', EngineChoice.BDD, n_cuts, jobs, pool)
        logger.info("dag bench: %d nodes in %.4f s", m.nodes, m.time_s)
        measurements.append(m)
    return measurements


def group_measurements(measurements: Sequence[BenchMeasurement], width: int = GROUP_WIDTH) -> List[BenchGroup]:
    """Bucket instances by ceil(nodes / width); mean node count and runtime per bucket"""
    if width < 1:
        raise ValueError(f"group width must be positive, got {width}")
    buckets = {}
    for m in measurements:
        buckets.setdefault(math.ceil(m.nodes / width), []).append(m)
    groups = []
    for key in sorted(buckets):
        members = buckets[key]
        times = np.array([m.time_s for m in members])
        groups.append(BenchGroup(
            group=key, count=len(members),
            nodes_mean=float(np.mean([m.nodes for m in members])),
            time_mean_s=float(times.mean()),
            time_std_s=float(times.std()),
        ))
    return groups


def linear_fit(groups: Sequence[BenchGroup]) -> LinearFit:
    """Least-squares line time_mean_s ~ nodes_mean and its R^2"""
    if len(groups) < 2:
        raise ValueError("a linear fit needs at least two groups")
    x = np.array([g.nodes_mean for g in groups])
    y = np.array([g.time_mean_s for g in groups])
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(((y - (slope * x + intercept)) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    # constant times leave only rounding noise in ss_tot
    if ss_tot <= FLAT_TOL * max(1.0, float((y ** 2).sum())):
        return LinearFit(float(slope), float(intercept), 1.0)
    r_squared = 1.0 - ss_res / ss_tot
    return LinearFit(float(slope), float(intercept), r_squared)
