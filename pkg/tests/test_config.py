#!/usr/bin/env python3
"""
Tests for configuration loading, validation and hashing.
"""

import sys
import os
import json
import shutil
import tempfile
import unittest
from unittest.mock import patch

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from horokit.config import DEFAULT_CONFIG, DEFAULT_TOLERANCES, SUITE_NAMES, config_hash, load_config
from horokit.errors import ConfigInvalid, UnknownSuite
from horokit.transforms import N_QUAD


class TestLoadConfig(unittest.TestCase):
    """Test load_config: defaults, file merge and environment overrides."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def _write(self, payload, name='config.json'):
        path = os.path.join(self.test_dir, name)
        with open(path, 'w') as f:
            if isinstance(payload, str):
                f.write(payload)
            else:
                json.dump(payload, f)
        return path

    @patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):
        config = load_config()
        self.assertEqual(config.seed, DEFAULT_CONFIG['seed'])
        self.assertEqual(config.max_workers, 4)
        self.assertEqual(config.rank_one_model.n, 2)
        self.assertEqual(list(config.suites), list(SUITE_NAMES))
        self.assertEqual(len(config.packets), 3)

    @patch.dict(os.environ, {}, clear=True)
    def test_file_merges_over_defaults(self):
        path = self._write({'seed': 7, 'grids': {'samples': 10}, 'tolerances': {'cauchy': 1e-2}})
        config = load_config(path)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.grids['samples'], 10)
        self.assertEqual(config.grids['pair_samples'], DEFAULT_CONFIG['grids']['pair_samples'])
        self.assertEqual(config.tolerance('cauchy'), 1e-2)
        self.assertEqual(config.tolerance('gamma'), DEFAULT_TOLERANCES['gamma'])

    def test_defaults_are_not_mutated(self):
        path = self._write({'grids': {'samples': 3}})
        load_config(path)
        self.assertEqual(DEFAULT_CONFIG['grids']['samples'], 1000)

    @patch.dict(os.environ, {'HOROKIT_SEED': '99', 'HOROKIT_MAX_WORKERS': '2'}, clear=True)
    def test_environment_overrides(self):
        path = self._write({'seed': 7})
        config = load_config(path)
        self.assertEqual(config.seed, 99)
        self.assertEqual(config.max_workers, 2)

    @patch.dict(os.environ, {'HOROKIT_SEED': 'abc'}, clear=True)
    def test_bad_environment_value(self):
        with self.assertRaises(ConfigInvalid):
            load_config()

    def test_missing_file(self):
        with self.assertRaises(ConfigInvalid):
            load_config(os.path.join(self.test_dir, 'absent.json'))

    def test_unreadable_json(self):
        with self.assertRaises(ConfigInvalid):
            load_config(self._write('{not json'))

    def test_unknown_key(self):
        with self.assertRaises(ConfigInvalid):
            load_config(self._write({'colour': 'blue'}))

    def test_validation_errors(self):
        bad = [
            {'model': {'type': 'sp2r'}},
            {'model': {'type': 'so1n', 'n': 1}},
            {'packets': []},
            {'packets': [{'family': 'lorentzian'}]},
            {'packets': [{'family': 'gaussian', 'sigma': -1.0}]},
            {'tolerances': {'cauchy': 0.0}},
            {'tolerances': {'made_up': 1e-3}},
            {'quadrature': {'n': {'rel_tol': 0.0}}},
            {'quadrature': {'n': {'speed': 2}}},
            {'quadrature': {'zeta': {}}},
            {'max_workers': 0},
        ]
        for i, payload in enumerate(bad):
            with self.subTest(payload=payload):
                with self.assertRaises(ConfigInvalid):
                    load_config(self._write(payload, f"bad{i}.json"))

    def test_unknown_suite(self):
        with self.assertRaises(UnknownSuite):
            load_config(self._write({'suites': ['specfun', 'astrology']}))


class TestSuiteConfig(unittest.TestCase):
    """Test SuiteConfig helpers."""

    @patch.dict(os.environ, {}, clear=True)
    def setUp(self):
        self.config = load_config()

    def test_build_packets(self):
        packets = self.config.build_packets()
        self.assertEqual([p.name for p in packets], ['p0-gaussian', 'p1-gaussian_poly', 'p2-gaussian_pair'])
        self.assertEqual(packets[1].profile.coefficients, (1.0, 0.0, 0.2))
        self.assertEqual(packets[2].profile.center, 3.0)

    def test_quadrature_override(self):
        self.assertIs(self.config.quadrature_spec('n'), N_QUAD)
        self.config.quadrature = {'n': {'rel_tol': 1e-6}}
        spec = self.config.quadrature_spec('n')
        self.assertEqual(spec.rel_tol, 1e-6)
        self.assertEqual(spec.tail_cutoff, N_QUAD.tail_cutoff)

    def test_ell_grid(self):
        grid = self.config.ell_grid()
        self.assertEqual(len(grid), 12)
        self.assertEqual(grid[0], 0.25)
        self.assertEqual(grid[-1], 16.0)

    def test_hash_is_stable(self):
        first = config_hash(self.config)
        self.assertEqual(first, config_hash(self.config))
        self.assertEqual(len(first), 64)
        self.config.seed += 1
        self.assertNotEqual(first, config_hash(self.config))


if __name__ == '__main__':
    unittest.main()
