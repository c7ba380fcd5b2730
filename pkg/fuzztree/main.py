"""
fuzztree command line
analyze / oracle / gen / bench / curve / history
"""
import argparse
import json
import logging
import random
import sys
from pathlib import Path

from .bench import GROUP_WIDTH, group_measurements, linear_fit, run_dag_bench, run_tree_bench
from .benchgen import FuzzShape, GenConfig, fuzzify_shapes, generate
from .config import configure_logging, load_settings
from .database import get_bench_runs, get_latest_results, save_analysis_result, save_bench_run
from .engines import EngineChoice
from .errors import FuzzTreeError
from .ft_model import unreliability_bruteforce
from .ftfile import read_ft_file, write_ft_file
from .fuzzy_core import DiscreteFuzzy, shape_to_discrete
from .fuzzy_unreliability import fuzzy_unreliability, fuzzy_unreliability_discrete
from .report_generator import (
    CURVE_INTERPOLATIONS, ReportGenerator, bench_csv, bench_summary_text, curve_csv, curve_points,
    instances_csv, read_result_file,
)

logger = logging.getLogger("fuzztree.main")

DEFAULT_TREE_SIZES = (1000, 2000, 5000, 10000, 20000, 50000, 100000)
LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def _emit(text: str, out=None):
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        logger.info("wrote %s", path)
    else:
        sys.stdout.write(text)


# === Commands ===

def cmd_analyze(args, settings) -> int:
    n_cuts = args.cuts or settings.n_cuts
    parsed = read_ft_file(args.file)
    engine = None if args.engine == 'auto' else EngineChoice(args.engine)
    result = fuzzy_unreliability(parsed.tree, parsed.fuzzy_probs(n_cuts), engine=engine,
                                 jobs=args.jobs, modularize=args.modularize, settings=settings)
    report = ReportGenerator(result, source=str(args.file), tree=parsed.tree)
    sys.stdout.write(report.generate_summary_text())
    if args.out:
        report.generate_json_report(args.out)
    if args.archive:
        save_analysis_result(str(args.file), result, parsed.tree, db_path=settings.db_path)
    return 0


def cmd_oracle(args, settings) -> int:
    parsed = read_ft_file(args.file)
    crisp = unreliability_bruteforce(parsed.tree, parsed.probs, cap=settings.brute_force_cap)
    discrete = [
        shape_to_discrete(shape, args.cuts) if shape is not None else DiscreteFuzzy({p: 1.0})
        for p, shape in zip(parsed.probs, parsed.shapes)
    ]
    fuzzy = fuzzy_unreliability_discrete(parsed.tree, discrete, settings=settings)
    payload = {
        'crisp': crisp,
        'fuzzy': [[x, degree] for x, degree in fuzzy.items()],
    }
    _emit(json.dumps(payload, indent=2) + '\n', args.out)
    return 0


def cmd_gen(args, settings) -> int:
    cfg = GenConfig(seed=args.seed, target_size=args.size, combine_bias=args.bias,
                    dag=args.dag, dag_sharing=args.sharing if args.dag else 0.0,
                    fuzz_shape=args.fuzz or FuzzShape.TRIANGULAR, fuzz_spread=args.spread)
    tree, probs = generate(cfg)
    shapes = None
    if args.fuzz:
        shapes = fuzzify_shapes(probs, cfg.fuzz_shape, cfg.fuzz_spread, random.Random(cfg.seed))
    write_ft_file(args.out, tree, probs, shapes)
    logger.info("generated %d nodes (%d basic events)", tree.node_count, tree.n_basic_events)
    return 0


def cmd_bench(args, settings) -> int:
    n_cuts = args.cuts or settings.n_cuts
    jobs = args.jobs or settings.jobs
    if args.mode == 'tree':
        measurements = run_tree_bench(args.sizes or DEFAULT_TREE_SIZES, count=args.count or 1,
                                      seed=args.seed, n_cuts=n_cuts,
                                      fuzz=args.fuzz or FuzzShape.MIXED, spread=args.spread, jobs=jobs)
    else:
        measurements = run_dag_bench(count=args.count or 125, seed=args.seed, n_cuts=n_cuts,
                                     fuzz=args.fuzz or FuzzShape.TRIANGULAR, spread=args.spread,
                                     jobs=jobs)
    groups = group_measurements(measurements, args.group_width)
    fit = linear_fit(groups) if args.mode == 'tree' and len(groups) >= 2 else None
    _emit(bench_csv(groups), args.out)
    if args.instances:
        _emit(instances_csv(measurements), args.instances)
    sys.stderr.write(bench_summary_text(args.mode, measurements, fit))
    if args.archive:
        save_bench_run(args.mode, len(measurements), groups, fit, db_path=settings.db_path)
    return 0


def cmd_curve(args, settings) -> int:
    result = read_result_file(args.file)
    _emit(curve_csv(curve_points(result, args.interpolate), args.interpolate), args.out)
    return 0


def cmd_history(args, settings) -> int:
    for row in get_latest_results(limit=args.limit, db_path=settings.db_path):
        crisp = '' if row['crisp_value'] is None else f" crisp={row['crisp_value']:.15g}"
        print(f"#{row['id']} {row['created_at']} {row['source']} "
              f"engine={row['engine']} cuts={row['n_cuts']}{crisp}")
    for row in get_bench_runs(limit=args.limit, db_path=settings.db_path):
        fit = '' if row['r_squared'] is None else f" R^2={row['r_squared']:.4f}"
        print(f"#{row['id']} {row['created_at']} bench {row['mode']} "
              f"instances={row['instances']}{fit}")
    return 0


# === Argument parsing ===

def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _unit_float(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='fuzztree', description="Fuzzy fault tree analysis with alpha-cuts")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="lower the log level (repeatable)")
    parser.add_argument('--db', type=Path, help="SQLite archive path (FUZZTREE_DB)")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', help="fuzzy unreliability of a fault tree file")
    p.add_argument('file', type=Path)
    p.add_argument('--engine', choices=['auto'] + [e.value for e in EngineChoice], default='auto')
    p.add_argument('--cuts', type=_positive_int, help="number of alpha-cuts (FUZZTREE_CUTS)")
    p.add_argument('--modularize', action='store_true', help="BDD per independent module")
    p.add_argument('--jobs', type=_positive_int, help="worker cap (FUZZTREE_JOBS)")
    p.add_argument('--out', type=Path, help="write a JSON result file")
    p.add_argument('--archive', action='store_true', help="store the result in the archive")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser('oracle', help="brute-force crisp and discrete fuzzy unreliability")
    p.add_argument('file', type=Path)
    p.add_argument('--cuts', type=_positive_int, default=2)
    p.add_argument('--out', type=Path)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser('gen', help="generate a benchmark fault tree file")
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--size', type=_positive_int, required=True)
    p.add_argument('--bias', type=_unit_float, default=0.5, help="probability of a horizontal step")
    p.add_argument('--dag', action='store_true')
    p.add_argument('--sharing', type=_unit_float, default=0.3)
    p.add_argument('--fuzz', choices=[s.value for s in FuzzShape])
    p.add_argument('--spread', type=_unit_float, default=0.2)
    p.add_argument('--out', type=Path, required=True)
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser('bench', help="runtime experiment over generated fault trees")
    p.add_argument('--mode', choices=['tree', 'dag'], default='tree')
    p.add_argument('--sizes', type=_positive_int, nargs='+')
    p.add_argument('--count', type=_positive_int, help="instances per size (tree) or in total (dag)")
    p.add_argument('--group-width', type=_positive_int, default=GROUP_WIDTH)
    p.add_argument('--fuzz', choices=[s.value for s in FuzzShape])
    p.add_argument('--spread', type=_unit_float, default=0.2)
    p.add_argument('--cuts', type=_positive_int)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--jobs', type=_positive_int)
    p.add_argument('--out', type=Path, help="group CSV (default stdout)")
    p.add_argument('--instances', type=Path, help="per-instance CSV")
    p.add_argument('--archive', action='store_true')
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser('curve', help="membership curve of a result file as CSV")
    p.add_argument('file', type=Path)
    p.add_argument('--interpolate', choices=CURVE_INTERPOLATIONS, default='step',
                   help="linear joins cut endpoints for plotting only")
    p.add_argument('--out', type=Path)
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser('history', help="list archived analyses and bench runs")
    p.add_argument('--limit', type=_positive_int, default=20)
    p.set_defaults(handler=cmd_history)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
        if args.db is not None:
            settings = settings.model_copy(update={'db_path': args.db})
        level = LEVELS[max(0, LEVELS.index(settings.log_level) - args.verbose)] \
            if settings.log_level in LEVELS else settings.log_level
        configure_logging(level)
        return args.handler(args, settings)
    except (FuzzTreeError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == '__main__':
    sys.exit(main())
