#!/usr/bin/env python3
"""
Tests for the command line interface.
"""

import sys
import os
import io
import json
import runpy
import shutil
import tempfile
import unittest
from unittest.mock import MagicMock, patch

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from horokit import cli
from horokit.errors import ConfigInvalid, NonConvergence
from horokit.report import CheckRecord, Report, failed_record


def make_report(passed=True):
    report = Report('specfun', metadata={'seed': 1, 'config_hash': 'f' * 64, 'started': '2024-06-11T10:00:00',
                                         'constants': {'tube_kernel_origin': 0.6266570686577501}})
    report.records.append(CheckRecord('specfun', 'gamma', 'Gamma(z+1) = z Gamma(z)', 1.0, 1.0, 1e-11))
    if not passed:
        report.records.append(failed_record('specfun', 'beta', 'beta lemma', 'Error in beta: boom'))
    return report


@patch.dict(os.environ, {}, clear=True)
class TestVerifyCommand(unittest.TestCase):
    """Test the verify subcommand and its exit codes."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def run_main(self, argv):
        with patch('sys.stdout', new_callable=io.StringIO) as out:
            code = cli.main(argv)
        return code, out.getvalue()

    def test_no_command(self):
        code, output = self.run_main([])
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertIn('verify', output)

    def test_list(self):
        code, output = self.run_main(['verify', '--list'])
        self.assertEqual(code, cli.EXIT_OK)
        lines = output.split()
        self.assertIn('cauchy-radon', lines)
        self.assertEqual(lines[-1], 'all')

    def test_module_invocation(self):
        """python3 -m horokit verify --list runs the same command line."""
        with patch.object(sys, 'argv', ['horokit', 'verify', '--list']), \
                patch('sys.stdout', new_callable=io.StringIO) as out:
            with self.assertRaises(SystemExit) as raised:
                runpy.run_module('horokit', run_name='__main__', alter_sys=False)
        self.assertEqual(raised.exception.code, cli.EXIT_OK)
        self.assertIn('cauchy-radon', out.getvalue().split())

    def test_unknown_suite(self):
        code, output = self.run_main(['verify', 'bogus'])
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertIn('Configuration error', output)

    def test_missing_config(self):
        code, output = self.run_main(['verify', 'specfun', '--config', os.path.join(self.test_dir, 'nope.json')])
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertIn('config file not found', output)

    def test_passing_run_writes_outputs(self):
        out = os.path.join(self.test_dir, 'report.json')
        csv_dir = os.path.join(self.test_dir, 'csv')
        db_path = os.path.join(self.test_dir, 'runs.db')
        with patch('horokit.cli.run_suite', return_value=make_report()) as run:
            code, output = self.run_main(['verify', 'specfun', '--out', out, '--csv', csv_dir,
                                          '--history', db_path, '--workers', '2'])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(run.call_args.kwargs['max_workers'], 2)
        self.assertIn('SUMMARY', output)
        self.assertIn('Failed: 0', output)
        self.assertIn('tube_kernel_origin', output)
        self.assertTrue(os.path.exists(out))
        self.assertTrue(os.path.exists(os.path.join(csv_dir, 'specfun.csv')))
        self.assertTrue(os.path.exists(db_path))
        with open(out) as f:
            self.assertTrue(json.load(f)['passed'])

    def test_failing_run(self):
        with patch('horokit.cli.run_suite', return_value=make_report(passed=False)):
            code, output = self.run_main(['verify', 'specfun'])
        self.assertEqual(code, cli.EXIT_FAILED)
        self.assertIn('Failed: 1', output)

    def test_output_from_config(self):
        out = os.path.join(self.test_dir, 'from_config.json')
        config_path = os.path.join(self.test_dir, 'config.json')
        with open(config_path, 'w') as f:
            json.dump({'output': {'json': out}}, f)
        with patch('horokit.cli.run_suite', return_value=make_report()):
            code, _ = self.run_main(['verify', 'specfun', '--config', config_path])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertTrue(os.path.exists(out))


@patch.dict(os.environ, {}, clear=True)
class TestEvalCommand(unittest.TestCase):
    """Test the eval subcommand."""

    def run_main(self, argv):
        with patch('sys.stdout', new_callable=io.StringIO) as out:
            code = cli.main(argv)
        return code, out.getvalue()

    def test_real_radon_needs_real_coordinate(self):
        code, output = self.run_main(['eval', 'radon', '--z', '0.3j'])
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertIn('radon_holomorphic', output)

    def test_packet_out_of_range(self):
        code, output = self.run_main(['eval', 'abel', '--packet', '7'])
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertIn('out of range', output)

    def test_prints_json_routes(self):
        values = {'spectral': 1.5 + 0.5j, 'geometric_sup': 1.4}
        with patch('horokit.cli.evaluate', return_value=values) as evaluate:
            code, output = self.run_main(['eval', 'hardy_norm', '--packet', '1'])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(json.loads(output), {'spectral': [1.5, 0.5], 'geometric_sup': [1.4, 0.0]})
        transform, packet, z, w = evaluate.call_args.args
        self.assertEqual(transform, 'hardy_norm')
        self.assertEqual(packet.name, 'p1-gaussian_poly')

    def test_numerical_failure_exits_one(self):
        with patch('horokit.cli.evaluate', side_effect=NonConvergence('budget exhausted')):
            code, output = self.run_main(['eval', 'cauchy', '--z', '0.2+0.1j'])
        self.assertEqual(code, cli.EXIT_FAILED)
        self.assertIn('NonConvergence', output)

    def test_unknown_transform(self):
        with self.assertRaises(ConfigInvalid):
            cli.evaluate('fourier', MagicMock(), 0j, 0j)


if __name__ == '__main__':
    unittest.main()
