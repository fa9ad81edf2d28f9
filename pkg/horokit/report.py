#!/usr/bin/env python3
"""
Check records, reports and their persistence.

A report is written as one JSON file with full provenance, one CSV table per
suite (pandas) and, optionally, appended to a sqlite run history.
"""

import json
import math
import os
import sqlite3
from dataclasses import asdict, dataclass, field
from datetime import datetime

import pandas as pd

GOLDEN_FILE = os.path.join(os.path.dirname(__file__), "golden.json")
CSV_COLUMNS = ['check', 'anchor', 'route_a', 'route_b', 'abs_diff', 'rel_diff', 'tol', 'pass']


@dataclass
class CheckRecord:
    """One verified identity.

    ``metric`` names the discrepancy compared against ``tol``: 'rel' or 'abs'.
    """
    suite: str
    check: str
    anchor: str
    route_a: complex
    route_b: complex
    tol: float
    metric: str = 'rel'
    abs_diff: float = math.nan
    rel_diff: float = math.nan
    passed: bool = False
    wall_time: float = 0.0
    error: str = ''
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.error:
            a, b = complex(self.route_a), complex(self.route_b)
            self.abs_diff = abs(a - b)
            scale = max(abs(a), abs(b))
            if not math.isfinite(self.abs_diff):
                self.rel_diff = math.nan
            else:
                self.rel_diff = self.abs_diff / scale if scale > 0 else 0.0
        self.passed = recompute_pass(self)

    @property
    def discrepancy(self):
        return self.rel_diff if self.metric == 'rel' else self.abs_diff


def recompute_pass(record: CheckRecord):
    """pass iff no error and the discrepancy is within tolerance."""
    if record.error:
        return False
    value = record.rel_diff if record.metric == 'rel' else record.abs_diff
    return bool(math.isfinite(value) and value <= record.tol)


def failed_record(suite, check, anchor, message, wall_time=0.0):
    return CheckRecord(suite, check, anchor, math.nan, math.nan, 0.0, error=message, wall_time=wall_time)


@dataclass
class Report:
    suite: str
    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def sort(self):
        self.records.sort(key=lambda r: (r.suite, r.check))
        return self

    @property
    def passed(self):
        return not self.failures

    @property
    def failures(self):
        """Failed records; experimental records never count."""
        return [r for r in self.records if not r.passed and not r.metadata.get('experimental')]

    def constants(self):
        return self.metadata.setdefault('constants', {})

    def merge(self, other):
        self.records.extend(other.records)
        for key, value in other.metadata.get('constants', {}).items():
            self.constants()[key] = value
        return self


def _number(value):
    """repr of a float or complex; identical runs give identical text."""
    if isinstance(value, complex):
        return repr(value.real) if value.imag == 0 else repr(value)
    if isinstance(value, (float, int)) and not isinstance(value, bool):
        return repr(float(value))
    return value


def _jsonable(value):
    if isinstance(value, complex):
        return {'re': value.real, 'im': value.imag}
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, 'item'):
        return _jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def write_json(report: Report, path):
    report.sort()
    payload = {
        'suite': report.suite,
        'passed': report.passed,
        'metadata': _jsonable(report.metadata),
        'records': [_jsonable(asdict(r)) for r in report.records],
    }
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2, sort_keys=True)
    return path


def to_frame(records):
    rows = [{
        'check': r.check,
        'anchor': r.anchor,
        'route_a': _number(complex(r.route_a)),
        'route_b': _number(complex(r.route_b)),
        'abs_diff': _number(r.abs_diff),
        'rel_diff': _number(r.rel_diff),
        'tol': _number(r.tol),
        'pass': r.passed,
    } for r in sorted(records, key=lambda r: (r.suite, r.check))]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def write_csv(report: Report, directory):
    """One CSV per suite; returns the written paths."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    suites = sorted({r.suite for r in report.records})
    for suite in suites:
        frame = to_frame([r for r in report.records if r.suite == suite])
        path = os.path.join(directory, f"{suite}.csv")
        frame.to_csv(path, index=False)
        paths.append(path)
    return paths


def init_history_db(db_path):
    """Create the run history tables if they do not exist."""
    conn = sqlite3.connect(db_path)
    cursor = conn.cursor()
    cursor.execute('''
        CREATE TABLE IF NOT EXISTS runs (
            run_id TEXT PRIMARY KEY,
            suite TEXT NOT NULL,
            started TEXT NOT NULL,
            seed INTEGER,
            config_hash TEXT,
            passed INTEGER NOT NULL,
            failed INTEGER NOT NULL
        )
    ''')
    cursor.execute('''
        CREATE TABLE IF NOT EXISTS checks (
            run_id TEXT NOT NULL,
            suite TEXT NOT NULL,
            check_name TEXT NOT NULL,
            anchor TEXT,
            abs_diff REAL,
            rel_diff REAL,
            tol REAL,
            pass INTEGER NOT NULL,
            error TEXT,
            wall_time REAL,
            PRIMARY KEY (run_id, suite, check_name)
        )
    ''')
    cursor.execute('CREATE INDEX IF NOT EXISTS idx_checks_name ON checks(check_name)')
    conn.commit()
    conn.close()


def save_history(report: Report, db_path):
    """Append a finished report to the sqlite history; returns the run id."""
    init_history_db(db_path)
    started = report.metadata.get('started') or datetime.now().isoformat()
    run_id = f"{report.suite}-{started}-{report.metadata.get('config_hash', '')[:12]}"
    conn = sqlite3.connect(db_path)
    cursor = conn.cursor()
    try:
        cursor.execute('''
            INSERT OR REPLACE INTO runs (run_id, suite, started, seed, config_hash, passed, failed)
            VALUES (?, ?, ?, ?, ?, ?, ?)
        ''', (run_id, report.suite, started, report.metadata.get('seed'), report.metadata.get('config_hash'),
              len(report.records) - len(report.failures), len(report.failures)))
        for r in report.records:
            cursor.execute('''
                INSERT OR REPLACE INTO checks
                    (run_id, suite, check_name, anchor, abs_diff, rel_diff, tol, pass, error, wall_time)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            ''', (run_id, r.suite, r.check, r.anchor, _finite_or_none(r.abs_diff), _finite_or_none(r.rel_diff),
                  r.tol, int(r.passed), r.error, r.wall_time))
        conn.commit()
    except Exception:
        conn.rollback()
        raise
    finally:
        conn.close()
    return run_id


def _finite_or_none(value):
    return float(value) if math.isfinite(value) else None


def load_golden(path=GOLDEN_FILE):
    with open(path, 'r') as f:
        return json.load(f)


def compare_golden(report: Report, tol, golden=None):
    """Records comparing each measured normalization constant with its golden value."""
    golden = golden if golden is not None else load_golden()
    records = []
    for name, measured in sorted(report.metadata.get('constants', {}).items()):
        entry = golden.get('constants', {}).get(name)
        if entry is None:
            records.append(failed_record('golden', name, 'golden.json', f"no golden value for {name!r}"))
            continue
        records.append(CheckRecord('golden', name, entry.get('anchor', 'golden.json'),
                                   complex(measured), complex(entry['value']), float(entry.get('tol', tol))))
    return records
