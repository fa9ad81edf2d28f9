#!/usr/bin/env python3
"""
Configuration for the verification harness.

load_config() starts from DEFAULT_CONFIG, merges the JSON file on top and
finally applies environment overrides (HOROKIT_SEED, HOROKIT_MAX_WORKERS).
"""

import copy
import hashlib
import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from horokit.errors import ConfigInvalid, UnknownSuite
from horokit.geometry import RankOneModel
from horokit.numerics import QuadratureSpec
from horokit.spectra import PROFILE_FAMILIES, SpectralProfile
from horokit.transforms import (
    ABEL_INNER,
    ABEL_OUTER,
    CAUCHY_INNER,
    CAUCHY_OUTER,
    H_QUAD,
    N_QUAD,
    WavePacket,
)

SUITE_NAMES = ('specfun', 'geometry', 'cauchy-radon', 'inversion', 'hardy-norm', 'kernels', 'tube')
MODEL_TYPES = ('sl2r', 'so1n')

QUADRATURE_DEFAULTS = {
    'n': N_QUAD,
    'h': H_QUAD,
    'cauchy_outer': CAUCHY_OUTER,
    'cauchy_inner': CAUCHY_INNER,
    'abel_outer': ABEL_OUTER,
    'abel_inner': ABEL_INNER,
}

DEFAULT_TOLERANCES = {
    'gamma': 1e-11,
    'plancherel': 1e-10,
    'beta_lemma': 1e-8,
    'phi_y_o': 1e-8,
    'phi_routes': 1e-6,
    'c1_coth': 1e-9,
    'kappa': 1e-9,
    'iwasawa': 1e-10,
    'separation': 0.05,
    'radon_routes': 1e-4,
    'radon_restriction': 1e-8,
    'radon_equivariance': 1e-6,
    'right_a_covariance': 1e-6,
    'cauchy_riemann': 1e-5,
    'weyl_invariance': 1e-8,
    'cauchy': 5e-3,
    'inversion': 1e-3,
    'dual_beta': 1e-6,
    'boundary_limit': 1e-2,
    'gutzmer': 1e-3,
    'geometric_norm': 0.02,
    'extrapolation': 1e-2,
    'lambda_ratio': 1e-3,
    'lambda_diagram': 1e-8,
    'tau_covariance': 1e-8,
    'kernel_reproducing': 1e-4,
    'tube_closed_form': 1e-8,
    'tube_reproducing': 1e-6,
    'tube_norm': 1e-8,
    'golden': 1e-3,
}

DEFAULT_CONFIG = {
    'model': {'type': 'sl2r', 'n': 2},
    'packets': [
        {'family': 'gaussian', 'sigma': 1.0},
        {'family': 'gaussian_poly', 'sigma': 1.5, 'coefficients': [1.0, 0.0, 0.2]},
        {'family': 'gaussian_pair', 'sigma': 0.4, 'center': 3.0},
    ],
    'grids': {
        'ell': {'start': 0.25, 'stop': 16.0, 'count': 12},
        'beta_lambdas': [0.0, 1.0, 2.0, 5.0, 10.0],
        'xi': [
            {'s': 0.0, 't': 0.0, 'angle': 0.0},
            {'s': 0.4, 't': 0.0, 'angle': 0.7},
            {'s': 0.2, 't': 0.3, 'angle': 0.0},
            {'s': -0.3, 't': -0.5, 'angle': 1.9},
        ],
        'X': [0.4, 1.0, 1.8],
        'epsilons': [0.2, 0.1, 0.05],
        'lambda_ells': [0.5, 1.5],
        'samples': 1000,
        'pair_samples': 100,
        'kernel_points': 3,
        'tube_points': [[0.0, 0.0], [0.3, 0.2], [-0.5, -0.3], [0.1, 0.6], [0.8, -0.1]],
    },
    'quadrature': {},
    'tolerances': {},
    'seed': 20240611,
    'max_workers': 4,
    'suites': list(SUITE_NAMES),
    'output': {'json': None, 'csv_dir': None, 'history': None},
}


@dataclass
class SuiteConfig:
    model: dict
    packets: list
    grids: dict
    quadrature: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: int = 20240611
    max_workers: int = 4
    suites: list = field(default_factory=lambda: list(SUITE_NAMES))
    output: dict = field(default_factory=dict)

    def __post_init__(self):
        validate(self)

    @property
    def rank_one_model(self):
        n = 2 if self.model.get('type') == 'sl2r' else int(self.model.get('n', 2))
        return RankOneModel(n)

    def build_packets(self):
        """WavePacket for every packet definition, named by position and family."""
        packets = []
        for i, spec in enumerate(self.packets):
            profile = SpectralProfile(
                family=spec['family'],
                sigma=float(spec.get('sigma', 1.0)),
                coefficients=tuple(float(c) for c in spec.get('coefficients', (1.0,))),
                center=float(spec.get('center', 0.0)))
            packets.append(WavePacket(profile, self.rank_one_model, name=f"p{i}-{spec['family']}"))
        return packets

    def quadrature_spec(self, name):
        """Named QuadratureSpec with the configured overrides applied."""
        overrides = self.quadrature.get(name, {})
        return replace(QUADRATURE_DEFAULTS[name], **overrides) if overrides else QUADRATURE_DEFAULTS[name]

    def tolerance(self, name):
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def ell_grid(self):
        grid = self.grids['ell']
        return np.linspace(grid['start'], grid['stop'], int(grid['count']))

    def as_dict(self):
        return {
            'model': self.model,
            'packets': self.packets,
            'grids': self.grids,
            'quadrature': self.quadrature,
            'tolerances': self.tolerances,
            'seed': self.seed,
            'max_workers': self.max_workers,
            'suites': self.suites,
            'output': self.output,
        }


def validate(config: SuiteConfig):
    """Raise ConfigInvalid on the first problem found."""
    model_type = config.model.get('type')
    if model_type not in MODEL_TYPES:
        raise ConfigInvalid(f"unknown model type {model_type!r}; expected one of {MODEL_TYPES}")
    if model_type == 'so1n' and int(config.model.get('n', 0)) < 2:
        raise ConfigInvalid(f"model n must be >= 2, got {config.model.get('n')}")
    if not config.packets:
        raise ConfigInvalid("packet list is empty")
    for spec in config.packets:
        if spec.get('family') not in PROFILE_FAMILIES:
            raise ConfigInvalid(f"unknown profile family {spec.get('family')!r}")
        if float(spec.get('sigma', 1.0)) <= 0:
            raise ConfigInvalid("packet sigma must be positive")
    for name, overrides in config.quadrature.items():
        if name not in QUADRATURE_DEFAULTS:
            raise ConfigInvalid(f"unknown quadrature spec {name!r}")
        unknown = set(overrides) - set(QuadratureSpec.__dataclass_fields__)
        if unknown:
            raise ConfigInvalid(f"unknown quadrature fields {sorted(unknown)} for {name!r}")
        config.quadrature_spec(name)
    for name, value in config.tolerances.items():
        if name not in DEFAULT_TOLERANCES:
            raise ConfigInvalid(f"unknown tolerance {name!r}")
        if not float(value) > 0:
            raise ConfigInvalid(f"tolerance {name!r} must be positive")
    for name in config.suites:
        if name not in SUITE_NAMES and name != 'all':
            raise UnknownSuite(f"unknown suite {name!r}")
    if int(config.max_workers) < 1:
        raise ConfigInvalid("max_workers must be >= 1")


def _merge(base, extra):
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def load_config(path=None):
    """Load configuration from a JSON file merged over DEFAULT_CONFIG.

    Raises:
        ConfigInvalid: the file is missing or unreadable, or a value fails validation.
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        if not os.path.exists(path):
            raise ConfigInvalid(f"config file not found: {path}")
        try:
            with open(path, 'r') as f:
                _merge(config, json.load(f))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigInvalid(f"could not read config file {path}: {e}") from e

    seed = os.environ.get('HOROKIT_SEED')
    if seed:
        try:
            config['seed'] = int(seed)
        except ValueError:
            raise ConfigInvalid(f"HOROKIT_SEED must be an integer, got {seed!r}")
    workers = os.environ.get('HOROKIT_MAX_WORKERS')
    if workers:
        try:
            config['max_workers'] = int(workers)
        except ValueError:
            raise ConfigInvalid(f"HOROKIT_MAX_WORKERS must be an integer, got {workers!r}")

    unknown = set(config) - set(DEFAULT_CONFIG)
    if unknown:
        raise ConfigInvalid(f"unknown config keys {sorted(unknown)}")
    return SuiteConfig(**config)


def config_hash(config: SuiteConfig):
    """sha256 of the canonical JSON form (sorted keys)."""
    canonical = json.dumps(config.as_dict(), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
