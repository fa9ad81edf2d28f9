#!/usr/bin/env python3
"""
Command line interface.

Usage:
    python3 -m horokit verify <suite> [--config path.json] [--out report.json] [--csv dir]
                                      [--history runs.db] [--workers N] [--verbose]
    python3 -m horokit verify --list
    python3 -m horokit eval <transform> [--config path.json] [--packet i] [--z Z] [--w W]

Exit codes: 0 all checks pass, 1 any check fails, 2 configuration error.
"""

import argparse
import json
import logging
import sys

from horokit.config import load_config
from horokit.errors import ConfigInvalid, HorokitError
from horokit.geometry import QuadricPoint, make_generator, xi_from_coset
from horokit.hardy import hardy_norm_geometric, hardy_norm_spectral, reproducing_kernel
from horokit.report import save_history, write_csv, write_json
from horokit.suites import list_suites, run_suite
from horokit.transforms import (
    CAUCHY_CONSTANT,
    abel,
    abel_spectral,
    cauchy_transform,
    eval_packet,
    invert,
    radon_at,
    radon_real,
    radon_spectral,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

EVAL_TRANSFORMS = ('eval_packet', 'radon', 'radon_holomorphic', 'abel', 'cauchy', 'invert', 'kernel',
                   'hardy_norm')


def build_parser():
    parser = argparse.ArgumentParser(prog='horokit', description='Verify horospherical transform identities')
    sub = parser.add_subparsers(dest='command')

    verify = sub.add_parser('verify', help='Run a verification suite')
    verify.add_argument('suite', nargs='?', default='all', help='Suite name (see --list)')
    verify.add_argument('--config', help='Path to a JSON config file')
    verify.add_argument('--out', help='Write the JSON report here')
    verify.add_argument('--csv', help='Directory for per-suite CSV tables')
    verify.add_argument('--history', help='Append the run to this sqlite database')
    verify.add_argument('--workers', type=int, help='Number of worker threads')
    verify.add_argument('--list', action='store_true', help='List suites and exit')
    verify.add_argument('--verbose', '-v', action='store_true', help='Enable debug logging')

    evaluate = sub.add_parser('eval', help='Evaluate one transform of one packet')
    evaluate.add_argument('transform', choices=EVAL_TRANSFORMS)
    evaluate.add_argument('--config', help='Path to a JSON config file')
    evaluate.add_argument('--packet', type=int, default=0, help='Packet index in the config')
    evaluate.add_argument('--z', type=complex, default=0j, help='Complex A-coordinate of the point')
    evaluate.add_argument('--w', type=complex, default=0j, help='Second point (kernel)')
    evaluate.add_argument('--verbose', '-v', action='store_true', help='Enable debug logging')
    return parser


def _print_progress(index, total, suite, check, records, error):
    if error:
        print(f"[{index}/{total}] {suite}/{check.name}: ✗ {error}")
        return
    failed = [r for r in records if not r.passed and not r.metadata.get('experimental')]
    if failed:
        worst = max(failed, key=lambda r: r.discrepancy)
        print(f"[{index}/{total}] {suite}/{check.name}: ✗ {worst.check} "
              f"({worst.metric} diff {worst.discrepancy:.3e} > tol {worst.tol:.1e})")
    else:
        print(f"[{index}/{total}] {suite}/{check.name}: ✓ {len(records)} passed")


def print_summary(report):
    print()
    print("=" * 80)
    print("SUMMARY")
    print("=" * 80)
    print(f"{'Check':<52} {'Diff':>12} {'Tol':>10}  Pass")
    print("-" * 80)
    for r in report.records:
        diff = f"{r.discrepancy:.3e}" if not r.error else 'error'
        mark = '✓' if r.passed else ('~' if r.metadata.get('experimental') else '✗')
        print(f"{r.check[:52]:<52} {diff:>12} {r.tol:>10.1e}  {mark}")
    print("-" * 80)
    print(f"Total checks: {len(report.records)}")
    print(f"Passed: {len(report.records) - len(report.failures)}")
    print(f"Failed: {len(report.failures)}")
    for key, value in sorted(report.metadata.get('constants', {}).items()):
        print(f"  {key}: {value}")
    print("=" * 80)


def run_verify(args):
    if args.list:
        for name in list_suites():
            print(name)
        return EXIT_OK

    config = load_config(args.config)
    print("=" * 80)
    print(f"HOROKIT VERIFY: {args.suite}")
    print("=" * 80)
    print(f"Seed: {config.seed}")
    print(f"Workers: {args.workers or config.max_workers}")
    print(f"Packets: {', '.join(p['family'] for p in config.packets)}")
    print()

    report = run_suite(args.suite, config, max_workers=args.workers, progress=_print_progress)
    print_summary(report)

    out = args.out or config.output.get('json')
    csv_dir = args.csv or config.output.get('csv_dir')
    history = args.history or config.output.get('history')
    if out:
        print(f"\nReport saved to: {write_json(report, out)}")
    if csv_dir:
        for path in write_csv(report, csv_dir):
            print(f"CSV saved to: {path}")
    if history:
        print(f"History run id: {save_history(report, history)}")
    return EXIT_OK if report.passed else EXIT_FAILED


def _crown_point(model, z):
    return QuadricPoint(make_generator('a_z', z, model).act(model.x_o))


def evaluate(transform, f, z, w):
    """Values of one transform; returns a dict of route name -> value."""
    model = f.model
    if transform == 'eval_packet':
        return {'spectral': eval_packet(f, _crown_point(model, z)).value}
    if transform == 'radon':
        if z.imag != 0:
            raise ConfigInvalid("the real Radon transform needs a real A-coordinate; use radon_holomorphic")
        xi = xi_from_coset(make_generator('a_z', z.real, model), 0.0, model)
        return {'N-quadrature': radon_real(f, xi).value, 'spectral': radon_spectral(f, xi).value}
    if transform == 'radon_holomorphic':
        xi = xi_from_coset(make_generator('a_z', z.real, model), z.imag, model)
        return {'N-quadrature': radon_at(f, z).value, 'spectral': radon_spectral(f, xi).value}
    if transform == 'abel':
        return {'N-quadrature': abel(f, z).value, 'spectral': abel_spectral(f, z).value}
    if transform == 'cauchy':
        xi = xi_from_coset(make_generator('a_z', z.real, model), z.imag, model)
        return {'Y-quadrature': cauchy_transform(f, xi).value,
                'spectral': CAUCHY_CONSTANT * radon_spectral(f, xi).value}
    if transform == 'invert':
        route_a, route_b = invert(f)
        return {'route_a': route_a.value, 'route_b': route_b.value}
    if transform == 'kernel':
        return {'spectral': reproducing_kernel(_crown_point(model, z), _crown_point(model, w)).value}
    if transform == 'hardy_norm':
        geometric = hardy_norm_geometric(f)
        return {'spectral': hardy_norm_spectral(f).value, 'geometric_sup': geometric['sup'],
                'geometric_extrapolated': geometric['extrapolated']}
    raise ConfigInvalid(f"unknown transform {transform!r}")


def run_eval(args):
    config = load_config(args.config)
    packets = config.build_packets()
    if not 0 <= args.packet < len(packets):
        raise ConfigInvalid(f"packet index {args.packet} out of range (0..{len(packets) - 1})")
    f = packets[args.packet]
    try:
        values = evaluate(args.transform, f, args.z, args.w)
    except ConfigInvalid:
        raise
    except HorokitError as e:
        print(f"✗ {args.transform}: {type(e).__name__}: {str(e)}")
        return EXIT_FAILED
    print(json.dumps({k: [complex(v).real, complex(v).imag] for k, v in values.items()}, indent=2))
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(asctime)s %(name)s %(levelname)s %(message)s')
    try:
        if args.command == 'verify':
            return run_verify(args)
        return run_eval(args)
    except ConfigInvalid as e:
        print(f"Configuration error: {str(e)}")
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
