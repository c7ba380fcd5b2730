"""
SQLite archive of analyses and benchmark runs
"""
import json
import logging
import sqlite3
from pathlib import Path
from typing import Optional

from .config import load_settings

logger = logging.getLogger(__name__)


def _resolve(db_path) -> Path:
    path = Path(db_path) if db_path is not None else load_settings().db_path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def get_connection(db_path=None):
    """Connection with name-indexed rows"""
    conn = sqlite3.connect(str(_resolve(db_path)))
    conn.row_factory = sqlite3.Row
    return conn


def init_database(db_path=None):
    """Create the archive tables if missing"""
    conn = get_connection(db_path)
    cursor = conn.cursor()

    cursor.execute('''
        CREATE TABLE IF NOT EXISTS analysis_results (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            source TEXT NOT NULL,
            engine TEXT NOT NULL,
            n_cuts INTEGER NOT NULL,
            node_count INTEGER,
            basic_events INTEGER,
            crisp_value REAL,
            wall_time_ms REAL,
            result_data TEXT NOT NULL,
            created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
        )
    ''')

    cursor.execute('''
        CREATE TABLE IF NOT EXISTS bench_runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            mode TEXT NOT NULL,
            instances INTEGER NOT NULL,
            slope REAL,
            r_squared REAL,
            groups_data TEXT NOT NULL,
            created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
        )
    ''')

    conn.commit()
    conn.close()
    logger.debug("archive initialized at %s", db_path)


def save_analysis_result(source: str, result, tree=None, db_path=None) -> int:
    """Store one AnalysisResult; returns its row id"""
    init_database(db_path)
    conn = get_connection(db_path)
    cursor = conn.cursor()

    cursor.execute('''
        INSERT INTO analysis_results
            (source, engine, n_cuts, node_count, basic_events, crisp_value, wall_time_ms, result_data)
        VALUES (?, ?, ?, ?, ?, ?, ?, ?)
    ''', (
        str(source),
        result.engine.value,
        result.n_cuts,
        tree.node_count if tree is not None else None,
        tree.n_basic_events if tree is not None else None,
        result.crisp_value,
        result.wall_time_ms,
        result.model_dump_json(),
    ))

    conn.commit()
    row_id = cursor.lastrowid
    conn.close()
    logger.info("archived analysis of %s as #%d", source, row_id)
    return row_id


def get_latest_results(source: Optional[str] = None, limit: int = 20, db_path=None) -> list:
    """Most recent analyses first, optionally for one source file"""
    init_database(db_path)
    conn = get_connection(db_path)
    cursor = conn.cursor()

    if source:
        cursor.execute('''
            SELECT * FROM analysis_results
            WHERE source = ?
            ORDER BY id DESC LIMIT ?
        ''', (str(source), limit))
    else:
        cursor.execute('''
            SELECT * FROM analysis_results
            ORDER BY id DESC LIMIT ?
        ''', (limit,))

    rows = cursor.fetchall()
    conn.close()
    results = []
    for row in rows:
        entry = dict(row)
        entry['result_data'] = json.loads(entry['result_data'])
        results.append(entry)
    return results


def save_bench_run(mode: str, instances: int, groups, fit=None, db_path=None) -> int:
    """Store the grouped output of one benchmark run"""
    init_database(db_path)
    conn = get_connection(db_path)
    cursor = conn.cursor()

    cursor.execute('''
        INSERT INTO bench_runs (mode, instances, slope, r_squared, groups_data)
        VALUES (?, ?, ?, ?, ?)
    ''', (
        mode,
        instances,
        fit.slope if fit is not None else None,
        fit.r_squared if fit is not None else None,
        json.dumps([g.model_dump() for g in groups]),
    ))

    conn.commit()
    row_id = cursor.lastrowid
    conn.close()
    logger.info("archived %s bench run as #%d", mode, row_id)
    return row_id


def get_bench_runs(mode: Optional[str] = None, limit: int = 20, db_path=None) -> list:
    init_database(db_path)
    conn = get_connection(db_path)
    cursor = conn.cursor()

    if mode:
        cursor.execute('''
            SELECT * FROM bench_runs
            WHERE mode = ?
            ORDER BY id DESC LIMIT ?
        ''', (mode, limit))
    else:
        cursor.execute('''
            SELECT * FROM bench_runs
            ORDER BY id DESC LIMIT ?
        ''', (limit,))

    rows = cursor.fetchall()
    conn.close()
    runs = []
    for row in rows:
        entry = dict(row)
        entry['groups_data'] = json.loads(entry['groups_data'])
        runs.append(entry)
    return runs
