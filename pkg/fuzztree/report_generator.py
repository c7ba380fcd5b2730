"""
Result files, text summaries and CSV emitters
- ResultFile: JSON form of an AnalysisResult
- membership curves for plotting (step or linear between stored cuts)
- benchmark group / instance tables
"""
import csv
import io
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import BaseModel, ValidationError, model_validator

from .bench import BenchGroup, BenchMeasurement, LinearFit
from .engines import EngineChoice
from .errors import ParseError
from .fuzzy_core import membership_at
from .fuzzy_unreliability import AnalysisResult

logger = logging.getLogger(__name__)

CSV_NUMBER_FORMAT = '.17g'
BENCH_COLUMNS = ('group', 'nodes_mean', 'time_mean_s', 'time_std_s')
INSTANCE_COLUMNS = ('seed', 'nodes', 'basic_events', 'engine', 'time_s')
CURVE_INTERPOLATIONS = ('step', 'linear')


class ResultFile(BaseModel):
    """On-disk analysis result; crisp_value is present only for a degenerate apex"""
    engine: EngineChoice
    n_cuts: int
    alpha: List[float]
    lower: List[float]
    upper: List[float]
    crisp_value: Optional[float] = None
    wall_time_ms: float

    @model_validator(mode='after')
    def _recheck(self):
        self.to_result()
        return self

    @classmethod
    def from_result(cls, result: AnalysisResult) -> 'ResultFile':
        return cls(
            engine=result.engine, n_cuts=result.n_cuts, alpha=result.alpha,
            lower=result.lower, upper=result.upper, crisp_value=result.crisp_value,
            wall_time_ms=result.wall_time_ms,
        )

    def to_result(self) -> AnalysisResult:
        return AnalysisResult(
            alpha=self.alpha, lower=self.lower, upper=self.upper, engine=self.engine,
            n_cuts=self.n_cuts, wall_time_ms=self.wall_time_ms,
        )

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode='json', exclude_none=True), indent=2) + '\n'


def read_result_file(path) -> AnalysisResult:
    text = Path(path).read_text(encoding='utf-8')
    try:
        return ResultFile.model_validate_json(text).to_result()
    except ValidationError as e:
        raise ParseError(f"{path}: not a valid result file: {e.errors()[0]['msg']}") from e


class ReportGenerator:
    """Human-readable and JSON views of one analysis"""

    def __init__(self, result: AnalysisResult, source: str = '', tree=None):
        self.result = result
        self.source = source
        self.tree = tree

    def generate_summary_text(self) -> str:
        r = self.result
        lines = [
            "Fuzzy unreliability summary",
            '=' * 50,
            f"Source: {self.source or '-'}",
            f"Analysed: {datetime.now().strftime('%Y-%m-%d %H:%M')}",
        ]
        if self.tree is not None:
            lines.append(f"Nodes: {self.tree.node_count} ({self.tree.n_basic_events} basic events)")
        lines += [
            f"Engine: {r.engine.value}" + (" (modularized)" if r.modularized else ''),
            f"Alpha-cuts: {r.n_cuts}",
            f"Wall time: {r.wall_time_ms:.3f} ms",
            '',
            f"{'alpha':>8}  {'lower':>22}  {'upper':>22}",
        ]
        for a, lo, hi in zip(r.alpha, r.lower, r.upper):
            lines.append(f"{a:>8.4f}  {lo:>22.15g}  {hi:>22.15g}")
        if r.crisp_value is not None:
            lines += ['', f"Crisp unreliability: {r.crisp_value:.15g}"]
        return '\n'.join(lines) + '\n'

    def generate_json_report(self, output_path=None) -> str:
        """Result file JSON; also written to output_path when given"""
        text = ResultFile.from_result(self.result).to_json()
        if output_path:
            path = Path(output_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding='utf-8')
            logger.info("wrote result file %s", path)
        return text


# === Membership curves ===

def curve_points(result: AnalysisResult, interpolate: str = 'step') -> list:
    """(x, membership) pairs for plotting the fuzzy unreliability"""
    f = result.as_alpha_fuzzy()
    if interpolate == 'step':
        xs = sorted(set(result.lower) | set(result.upper))
        return [(x, membership_at(f, x)) for x in xs]
    if interpolate == 'linear':
        left = list(zip(result.lower, result.alpha))
        right = list(zip(reversed(result.upper), reversed(result.alpha)))
        return left + right
    raise ValueError(f"unknown interpolation '{interpolate}' (step or linear)")


def _fmt(x) -> str:
    return format(float(x), CSV_NUMBER_FORMAT)


def curve_csv(points: Sequence[tuple], interpolate: str = 'step') -> str:
    """CSV of curve points; the interpolation column says how to join them.

    step: exact membership of the stored cuts. linear: straight lines between
    cut endpoints, a plotting aid only (membership between levels is not linear).
    """
    if interpolate not in CURVE_INTERPOLATIONS:
        raise ValueError(f"unknown interpolation '{interpolate}' (step or linear)")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(('x', 'membership', 'interpolation'))
    for x, mu in points:
        writer.writerow((_fmt(x), _fmt(mu), interpolate))
    return buf.getvalue()


# === Benchmark tables ===

def bench_csv(groups: Sequence[BenchGroup]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(BENCH_COLUMNS)
    for g in groups:
        writer.writerow((g.group, _fmt(g.nodes_mean), _fmt(g.time_mean_s), _fmt(g.time_std_s)))
    return buf.getvalue()


def instances_csv(measurements: Sequence[BenchMeasurement]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(INSTANCE_COLUMNS)
    for m in measurements:
        writer.writerow((m.seed, m.nodes, m.basic_events, m.engine.value, _fmt(m.time_s)))
    return buf.getvalue()


def bench_summary_text(mode: str, measurements: Sequence[BenchMeasurement],
                       fit: Optional[LinearFit] = None) -> str:
    times = [m.time_s for m in measurements]
    nodes = [m.nodes for m in measurements]
    lines = [
        f"{mode} benchmark: {len(measurements)} instances, "
        f"{min(nodes)}-{max(nodes)} nodes (mean {sum(nodes) / len(nodes):.1f})",
        f"runtime: max {max(times):.4f} s, mean {sum(times) / len(times):.4f} s",
    ]
    if fit is not None:
        lines.append(f"linear fit: {fit.slope:.3e} s/node + {fit.intercept:.3e} s, R^2 = {fit.r_squared:.4f}")
    return '\n'.join(lines) + '\n'
