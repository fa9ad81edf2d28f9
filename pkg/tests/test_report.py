#!/usr/bin/env python3
"""
Tests for check records, reports and their persistence.
"""

import sys
import os
import json
import math
import shutil
import sqlite3
import tempfile
import unittest

import pandas as pd

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from horokit.report import (
    CSV_COLUMNS,
    CheckRecord,
    Report,
    compare_golden,
    failed_record,
    load_golden,
    save_history,
    write_csv,
    write_json,
)


def sample_report():
    report = Report('all', metadata={'seed': 5, 'config_hash': 'abc123', 'started': '2024-06-11T10:00:00'})
    report.records = [
        CheckRecord('specfun', 'gamma', 'Gamma(z+1) = z Gamma(z)', 2.0, 2.0 + 1e-12, 1e-10),
        CheckRecord('tube', 'kernel', 'K(0, 0)', 0.5 + 0.25j, 0.5 + 0.25j, 1e-8),
        failed_record('specfun', 'beta', 'beta lemma', 'Error in beta: boom'),
    ]
    return report


class TestCheckRecord(unittest.TestCase):
    """Test discrepancy and pass computation."""

    def test_relative_pass(self):
        record = CheckRecord('s', 'c', 'a', 1.0, 1.0 + 1e-6, 1e-5)
        self.assertAlmostEqual(record.abs_diff, 1e-6, places=12)
        self.assertAlmostEqual(record.rel_diff, 1e-6 / (1.0 + 1e-6), places=12)
        self.assertTrue(record.passed)

    def test_relative_fail(self):
        record = CheckRecord('s', 'c', 'a', 1.0, 1.1, 1e-3)
        self.assertFalse(record.passed)
        self.assertEqual(record.discrepancy, record.rel_diff)

    def test_absolute_metric(self):
        """Absolute metric compares abs_diff, so a count of zero against zero passes."""
        record = CheckRecord('s', 'c', 'a', 0, 0, 0.0, metric='abs')
        self.assertTrue(record.passed)
        self.assertEqual(record.rel_diff, 0.0)
        record = CheckRecord('s', 'c', 'a', 3, 0, 0.0, metric='abs')
        self.assertFalse(record.passed)
        self.assertEqual(record.discrepancy, 3.0)

    def test_nonfinite_route_fails(self):
        record = CheckRecord('s', 'c', 'a', complex(math.nan, 0), 1.0, 1.0)
        self.assertFalse(record.passed)

    def test_failed_record(self):
        record = failed_record('s', 'c', 'a', 'Error in c: bad')
        self.assertFalse(record.passed)
        self.assertTrue(math.isnan(record.abs_diff))
        self.assertEqual(record.error, 'Error in c: bad')


class TestReport(unittest.TestCase):
    """Test Report aggregation."""

    def test_passed_and_failures(self):
        report = sample_report()
        self.assertFalse(report.passed)
        self.assertEqual([r.check for r in report.failures], ['beta'])
        report.records.pop()
        self.assertTrue(report.passed)

    def test_experimental_records_do_not_fail_the_report(self):
        report = Report('tube', records=[
            CheckRecord('tube', 'kernel', 'a', 1.0, 1.0, 1e-9),
            CheckRecord('tube', 'plane', 'a', 1.0, 2.0, 1e-6, metadata={'experimental': True}),
        ])
        self.assertTrue(report.passed)
        self.assertEqual(report.failures, [])
        self.assertFalse(report.records[1].passed)

    def test_empty_report_passes(self):
        self.assertTrue(Report('x').passed)

    def test_sort(self):
        report = sample_report().sort()
        self.assertEqual([(r.suite, r.check) for r in report.records],
                         [('specfun', 'beta'), ('specfun', 'gamma'), ('tube', 'kernel')])

    def test_merge(self):
        first = Report('a', metadata={'constants': {'x': 1.0}})
        second = Report('b', records=[CheckRecord('b', 'c', 'a', 1.0, 1.0, 1e-9)],
                        metadata={'constants': {'y': 2.0}})
        first.merge(second)
        self.assertEqual(len(first.records), 1)
        self.assertEqual(first.constants(), {'x': 1.0, 'y': 2.0})


class TestPersistence(unittest.TestCase):
    """Test JSON, CSV and sqlite output."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_write_json(self):
        report = sample_report()
        report.metadata['constants'] = {'tube_kernel_origin': 0.6266570686577501, 'z': 1 + 2j}
        path = write_json(report, os.path.join(self.test_dir, 'out', 'report.json'))
        with open(path) as f:
            payload = json.load(f)
        self.assertFalse(payload['passed'])
        self.assertEqual(payload['suite'], 'all')
        self.assertEqual(len(payload['records']), 3)
        self.assertEqual(payload['metadata']['constants']['z'], {'re': 1.0, 'im': 2.0})
        kernel = [r for r in payload['records'] if r['check'] == 'kernel'][0]
        self.assertEqual(kernel['route_a'], {'re': 0.5, 'im': 0.25})
        beta = [r for r in payload['records'] if r['check'] == 'beta'][0]
        self.assertEqual(beta['abs_diff'], 'nan')

    def test_write_json_is_deterministic(self):
        first = write_json(sample_report(), os.path.join(self.test_dir, 'a.json'))
        second = write_json(sample_report(), os.path.join(self.test_dir, 'b.json'))
        with open(first) as f, open(second) as g:
            self.assertEqual(f.read(), g.read())

    def test_write_csv(self):
        paths = write_csv(sample_report(), self.test_dir)
        self.assertEqual([os.path.basename(p) for p in paths], ['specfun.csv', 'tube.csv'])
        frame = pd.read_csv(paths[0], dtype=str)
        self.assertEqual(list(frame.columns), CSV_COLUMNS)
        self.assertEqual(list(frame['check']), ['beta', 'gamma'])
        self.assertEqual(frame['route_a'].iloc[1], '2.0')
        self.assertEqual(frame['pass'].iloc[1], 'True')
        tube = pd.read_csv(paths[1], dtype=str)
        self.assertEqual(tube['route_a'].iloc[0], repr(0.5 + 0.25j))

    def test_save_history(self):
        db_path = os.path.join(self.test_dir, 'runs.db')
        run_id = save_history(sample_report(), db_path)
        self.assertTrue(run_id.startswith('all-2024-06-11T10:00:00-abc123'))

        conn = sqlite3.connect(db_path)
        cursor = conn.cursor()
        cursor.execute('SELECT seed, passed, failed FROM runs WHERE run_id = ?', (run_id,))
        self.assertEqual(cursor.fetchone(), (5, 2, 1))
        cursor.execute('SELECT abs_diff, pass, error FROM checks WHERE check_name = ?', ('beta',))
        self.assertEqual(cursor.fetchone(), (None, 0, 'Error in beta: boom'))
        conn.close()

    def test_save_history_replaces_same_run(self):
        db_path = os.path.join(self.test_dir, 'runs.db')
        save_history(sample_report(), db_path)
        save_history(sample_report(), db_path)
        conn = sqlite3.connect(db_path)
        cursor = conn.cursor()
        cursor.execute('SELECT COUNT(*) FROM runs')
        self.assertEqual(cursor.fetchone()[0], 1)
        cursor.execute('SELECT COUNT(*) FROM checks')
        self.assertEqual(cursor.fetchone()[0], 3)
        conn.close()


class TestGolden(unittest.TestCase):
    """Test the golden constant file and comparison."""

    def test_load_golden(self):
        golden = load_golden()
        constants = golden['constants']
        self.assertEqual(len(constants), 6)
        self.assertAlmostEqual(constants['radon_normalization']['value'], 2 * math.pi, places=14)
        self.assertAlmostEqual(constants['dual_normalization']['value'], math.pi / 2, places=14)
        self.assertAlmostEqual(constants['abel_fourier_normalization']['value'], 4 * math.pi ** 2, places=12)
        self.assertAlmostEqual(constants['lambda_norm_ratio']['value'], math.sqrt(2 * math.pi) / 8, places=14)
        self.assertAlmostEqual(constants['tube_kernel_origin']['value'], math.sqrt(math.pi / 2) / 2, places=14)

    def test_compare_golden(self):
        report = Report('all', metadata={'constants': {'tube_kernel_origin': 0.6266570686577501,
                                                       'radon_normalization': 6.5}})
        records = compare_golden(report, 1e-3)
        self.assertEqual([r.check for r in records], ['radon_normalization', 'tube_kernel_origin'])
        self.assertFalse(records[0].passed)
        self.assertTrue(records[1].passed)
        self.assertEqual(records[1].tol, 1e-10)

    def test_missing_golden_entry(self):
        report = Report('all', metadata={'constants': {'mystery': 1.0}})
        records = compare_golden(report, 1e-3, golden={'constants': {}})
        self.assertEqual(len(records), 1)
        self.assertFalse(records[0].passed)
        self.assertIn('mystery', records[0].error)

    def test_custom_golden_default_tolerance(self):
        report = Report('all', metadata={'constants': {'c': 1.0005}})
        records = compare_golden(report, 1e-3, golden={'constants': {'c': {'value': 1.0}}})
        self.assertTrue(records[0].passed)
        self.assertEqual(records[0].anchor, 'golden.json')


if __name__ == '__main__':
    unittest.main()
