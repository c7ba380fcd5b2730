"""
SQLite archive
"""
import pytest

from fuzztree.bench import BenchGroup, LinearFit
from fuzztree.database import (
    get_bench_runs, get_connection, get_latest_results, init_database, save_analysis_result,
    save_bench_run,
)
from fuzztree.fuzzy_unreliability import FuzzyProbVector, fuzzy_unreliability


@pytest.fixture
def db_path(tmp_path):
    return tmp_path / 'archive' / 'fuzztree.db'


@pytest.fixture
def result(pump_tree, pump_probs):
    return fuzzy_unreliability(pump_tree, FuzzyProbVector.crisp(pump_probs, 3))


def test_init_creates_tables(db_path):
    init_database(db_path)
    conn = get_connection(db_path)
    tables = {row['name'] for row in conn.execute("SELECT name FROM sqlite_master WHERE type='table'")}
    conn.close()
    assert {'analysis_results', 'bench_runs'} <= tables


def test_save_and_list_results(db_path, pump_tree, result):
    first = save_analysis_result('a.dft', result, pump_tree, db_path=db_path)
    second = save_analysis_result('b.dft', result, db_path=db_path)
    assert second > first
    rows = get_latest_results(db_path=db_path)
    assert [r['source'] for r in rows] == ['b.dft', 'a.dft']
    assert rows[1]['node_count'] == 5 and rows[0]['node_count'] is None
    assert rows[1]['crisp_value'] == pytest.approx(0.368, abs=1e-12)
    assert rows[1]['result_data']['lower'] == result.lower
    assert [r['source'] for r in get_latest_results('a.dft', db_path=db_path)] == ['a.dft']
    assert len(get_latest_results(limit=1, db_path=db_path)) == 1


def test_save_and_list_bench_runs(db_path):
    groups = [BenchGroup(group=1, count=3, nodes_mean=70.0, time_mean_s=0.1, time_std_s=0.01)]
    save_bench_run('tree', 3, groups, LinearFit(1e-3, 0.0, 0.97), db_path=db_path)
    save_bench_run('dag', 3, groups, db_path=db_path)
    runs = get_bench_runs(db_path=db_path)
    assert [r['mode'] for r in runs] == ['dag', 'tree']
    assert runs[0]['r_squared'] is None
    assert runs[1]['r_squared'] == pytest.approx(0.97)
    assert runs[1]['groups_data'][0]['nodes_mean'] == 70.0
    assert [r['mode'] for r in get_bench_runs('tree', db_path=db_path)] == ['tree']
