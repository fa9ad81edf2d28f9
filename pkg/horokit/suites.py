#!/usr/bin/env python3
"""
Verification suites.

Each suite is a list of Check objects; a check computes one identity by two
routes and returns CheckRecords. run_suite() dispatches checks to a thread
pool and assembles the Report, the only synchronization point.
"""

import cmath
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from datetime import datetime
from typing import Callable

import numpy as np

from horokit import __version__
from horokit.config import SUITE_NAMES, SuiteConfig, config_hash
from horokit.errors import UnknownSuite
from horokit.geometry import (
    HALF_PI,
    QuadricPoint,
    dual_fiber_contains,
    h_element,
    horosphere_contains,
    iwasawa_point,
    iwasawa_reconstruct,
    make_generator,
    minkowski_pair,
    point_invariant,
    random_group_element,
    sample_D,
    sample_Xi,
    sample_Y,
    xi_from_coset,
    y_coset,
)
from horokit.hardy import (
    hardy_norm_geometric,
    hardy_norm_spectral,
    kernel_gram,
    kernel_pairing,
    lambda_fourier_check,
    lambda_map,
    orbital_direct,
    orbital_spectral,
    reproducing_kernel,
)
from horokit.numerics import QuadratureSpec, cbeta, cgamma, gauss_2f1, integrate, line
from horokit.report import CheckRecord, Report, compare_golden, failed_record
from horokit.spectra import (
    c1_coth_form,
    c1_normalized,
    c_function,
    c_reciprocal,
    cosh_weight,
    dual_constants,
    kappa,
    kappa_closed_form,
    multiplier_g,
    phi_at_y_o,
    plancherel_density,
    plancherel_gamma_route,
    spherical_fn,
    spherical_fn_integral,
    weyl_exponential_sum,
)
from horokit.transforms import (
    ABEL_FOURIER_NORMALIZATION,
    CAUCHY_CONSTANT,
    DUAL_NORMALIZATION,
    RADON_NORMALIZATION,
    abel,
    abel_spectral,
    boundary_limit,
    cauchy_transform,
    dual_radon_spectral,
    dual_transform,
    eval_packet,
    horo_power,
    invert,
    radon_at,
    radon_holomorphic,
    radon_real,
    radon_right_a,
    radon_spectral,
    radon_spectral_phi,
)
from horokit.tube_hardy import (
    gaussian_tube,
    lambda_multiplier,
    project_tau_invariant,
    sign_flip_model,
    strip_model,
    tau_defect,
    trivial_multiplier,
    tube_cosh,
    tube_eval,
    tube_hardy_norm,
    tube_inner,
    tube_kernel,
    tube_kernel_closed_form,
    tube_kernel_spectral,
    tube_norm_sup,
)

logger = logging.getLogger(__name__)

CAYLEY_LABEL = "Cayley rank-one"
BETA_QUAD = line(-math.inf, math.inf, rel_tol=1e-12, abs_tol=1e-15, tail_cutoff=40.0, decay_rate=1.0)
PLANE_KERNEL_QUAD = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13, max_subdivisions=20000)


@dataclass
class Check:
    name: str
    anchor: str
    run: Callable


def _record(suite, name, anchor, a, b, tol, metric='rel', **metadata):
    return CheckRecord(suite, name, anchor, complex(a), complex(b), float(tol), metric=metric, metadata=metadata)


def _worst(a, b):
    """The entry pair with the largest relative discrepancy."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    k = int(np.argmax(np.abs(a - b) / scale))
    return a[k], b[k]


def _constant(record, name, value):
    record.metadata.setdefault('constants', {})[name] = value
    return record


def _mean_constant(samples):
    """Mean of ((suite, check), value) samples, independent of completion order."""
    values = [value for _, value in sorted(samples, key=lambda s: s[0])]
    mean = complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values)) / len(values)
    return mean.real if mean.imag == 0 else mean


# specfun

def specfun_checks(config: SuiteConfig, packets):
    suite = 'specfun'
    ells = config.ell_grid()

    def gamma_recurrence():
        rng = np.random.default_rng(config.seed)
        z = rng.uniform(0.1, 6.0, 200) + 1j * rng.uniform(-6.0, 6.0, 200)
        a, b = _worst(cgamma(z + 1.0), z * cgamma(z))
        return [_record(suite, 'gamma_recurrence', 'Gamma(z+1) = z Gamma(z)', a, b, config.tolerance('gamma'))]

    def gamma_reflection():
        rng = np.random.default_rng(config.seed + 1)
        z = rng.uniform(-3.0, 3.0, 200) + 1j * rng.uniform(0.1, 3.0, 200)
        a, b = _worst(cgamma(z) * cgamma(1.0 - z), np.pi / np.sin(np.pi * z))
        return [_record(suite, 'gamma_reflection', 'Gamma(z) Gamma(1-z) = pi / sin(pi z)', a, b,
                        config.tolerance('gamma'))]

    def plancherel():
        ell = np.linspace(0.1, 30.0, 300)
        a, b = _worst(plancherel_gamma_route(ell), plancherel_density(ell))
        return [_record(suite, 'plancherel_gamma_route', '|c(i ell)|^-2 = (pi ell/2) tanh(pi ell/2)', a, b,
                        config.tolerance('plancherel'))]

    def c_function_inverse():
        lam = 1j * ells + 0.3
        a, b = _worst(c_function(lam) * c_reciprocal(lam), np.ones_like(lam))
        return [_record(suite, 'c_function_reciprocal', 'c(lambda) (1/c)(lambda) = 1', a, b,
                        config.tolerance('plancherel'))]

    def beta_lemma():
        records = []
        for lam in config.grids['beta_lambdas']:
            expo = -0.5 * (1.0 + 1j * lam)
            value, _ = integrate(lambda t: np.cosh(2.0 * t) ** expo, BETA_QUAD)
            target = 0.5 * cbeta(0.5, 0.25 * (1.0 + 1j * lam))
            records.append(_record(suite, f'beta_lemma[lambda={lam:g}]',
                                   'int dt / cosh(2t)^((1+i lambda)/2) = B(1/2, (1+i lambda)/4) / 2',
                                   value, target, config.tolerance('beta_lemma')))
        return records

    def phi_y_o():
        gauss = np.array([gauss_2f1(0.25 * (1 + 1j * e), 0.25 * (1 - 1j * e), 1.0, 1.0) for e in ells])
        a, b = _worst(phi_at_y_o(ells), gauss)
        records = [_record(suite, 'phi_at_y_o', 'phi_ell(y_o) = 2 / B((3-i ell)/4, (3+i ell)/4)', a, b,
                           config.tolerance('phi_y_o'))]
        records.append(_record(suite, 'phi_at_y_o_origin', '2F1(1/4, 1/4; 1; 1)',
                               gauss_2f1(0.25, 0.25, 1.0, 1.0), phi_at_y_o(0.0), config.tolerance('phi_y_o')))
        return records

    def phi_routes():
        points = sample_D(config.rank_one_model, 8, config.seed, x_max=0.6, spread=0.5)
        u = np.array([p.invariant for p, _ in points])
        ell = np.array([0.5, 2.0, 4.0])
        regions, k_integral = spherical_fn(ell, u), spherical_fn_integral(ell, u)
        a, b = _worst(regions, k_integral)
        diff = float(np.max(np.abs(regions - k_integral)))
        return [_record(suite, 'phi_two_routes', 'phi_ell by 2F1 regions and by the K-integral',
                        diff, 0.0, config.tolerance('phi_routes'), metric='abs', worst=(a, b))]

    def c1_coth():
        a, b = _worst(c1_normalized(ells), c1_coth_form(ells))
        return [_record(suite, 'c1_coth_form', 'C1 / (Gamma(1/2) / Gamma(3/4 - i ell/4) Gamma(3/4 + i ell/4))',
                        a, b, config.tolerance('c1_coth'))]

    def kappa_ratio():
        measured = kappa(ells)
        a, b = _worst(measured, kappa_closed_form(ells))
        spread = float(np.max(np.abs(measured)) - np.min(np.abs(measured)))
        return [_record(suite, 'kappa_closed_form', 'kappa = C2 / (g C1)', a, b, config.tolerance('kappa'),
                        spread=spread, kappa=[complex(k) for k in measured])]

    def g_c1_c2():
        c1, c2 = dual_constants(ells)
        a, b = _worst(multiplier_g(ells) * kappa_closed_form(ells) * c1, c2)
        return [_record(suite, 'g_C1_equals_C2', 'g kappa C1 = C2', a, b, config.tolerance('kappa'))]

    def cosh_symmetry():
        a, b = _worst(cosh_weight(ells), cosh_weight(-ells))
        c, d = _worst(cosh_weight(ells), weyl_exponential_sum(ells, 1j * math.pi))
        return [
            _record(suite, 'cosh_even', 'COSH(ell) = COSH(-ell)', a, b, config.tolerance('gamma')),
            _record(suite, 'cosh_weyl_sum', 'COSH = sum over W of z_H^(w lambda)', c, d, config.tolerance('gamma')),
        ]

    return [Check(fn.__name__, 'special functions', fn) for fn in (
        gamma_recurrence, gamma_reflection, plancherel, c_function_inverse, beta_lemma,
        phi_y_o, phi_routes, c1_coth, kappa_ratio, g_c1_c2, cosh_symmetry)]


# geometry

def geometry_checks(config: SuiteConfig, packets):
    suite = 'geometry'
    model = config.rank_one_model
    count = int(config.grids['samples'])
    pairs = int(config.grids['pair_samples'])

    def iwasawa_roundtrip():
        worst = 0.0
        violations = 0
        for point, X in sample_D(model, count, config.seed):
            factors = iwasawa_point(point)
            back = iwasawa_reconstruct(factors, model)
            scale = max(1.0, float(np.max(np.abs(point.z))))
            worst = max(worst, float(np.max(np.abs(back - point.z))) / scale)
            if abs(complex(factors.w).imag) > abs(X) + 1e-10:
                violations += 1
        return [
            _record(suite, 'iwasawa_roundtrip', 'z = n_v a_w x_o', worst, 0.0,
                    config.tolerance('iwasawa'), metric='abs', samples=count),
            _record(suite, 'complex_convexity', 'Im log a(g exp(iX) x_o) in conv(W X)', violations, 0, 0.0,
                    metric='abs', samples=count),
        ]

    def separation():
        threshold = config.tolerance('separation')
        xis = sample_Xi(model, HALF_PI - 0.1, pairs, config.seed)
        ys = sample_Y(model, pairs, config.seed + 1)
        zeta = np.array([x.zeta for x in xis])
        y = np.array([p.z for p in ys])
        gap = np.abs(1.0 - minkowski_pair(zeta[:, None, :], y[None, :, :]))
        closest = float(np.min(gap))
        return [_record(suite, 'xi_y_separation', 'min |1 - xi.y| over Xi_c x Y', int(np.sum(gap <= threshold)), 0,
                        0.0, metric='abs', closest=closest, threshold=threshold, pairs=pairs * pairs)]

    def incidence():
        failures = 0
        stray = 0
        v = np.linspace(-1.5, 1.5, 5)
        for xi in sample_Xi(model, HALF_PI - 0.1, 50, config.seed + 2):
            for s in v:
                n = make_generator('n_v', np.full(model.n - 1, s), model)
                point = QuadricPoint(xi.g.act((n @ make_generator('a_z', 1j * xi.t, model)).act(model.x_o)))
                if not (horosphere_contains(xi, point) and dual_fiber_contains(point, xi, model)):
                    failures += 1
                # xi.z = e^-0.5 off the horosphere
                shifted = QuadricPoint(xi.g.act((n @ make_generator('a_z', 1j * xi.t + 0.5, model)).act(model.x_o)))
                if horosphere_contains(xi, shifted) or dual_fiber_contains(shifted, xi, model):
                    stray += 1
        return [
            _record(suite, 'horosphere_incidence', 'xi.z = 1 on g N a_it x_o and in the dual fiber',
                    failures, 0, 0.0, metric='abs'),
            _record(suite, 'horosphere_non_incidence', 'xi.z != 1 on g N a_(it+s) x_o, s != 0',
                    stray, 0, 0.0, metric='abs'),
        ]

    def y_coset_roundtrip():
        worst = 0.0
        for y in sample_Y(model, 200, config.seed + 3):
            g = y_coset(y, model)
            scale = max(1.0, float(np.max(np.abs(y.z))))
            worst = max(worst, float(np.max(np.abs(g.act(model.y_o) - y.z))) / scale)
        return [_record(suite, 'y_coset_roundtrip', 'y = a_t n_v w y_o', worst, 0.0,
                        config.tolerance('iwasawa'), metric='abs')]

    def h_stabilizer():
        worst = max(float(np.max(np.abs(h_element(t, model).act(model.y_o) - model.y_o)))
                    for t in np.linspace(-3.0, 3.0, 13))
        return [_record(suite, 'h_fixes_y_o', 'H = Stab(y_o)', worst, 0.0, config.tolerance('iwasawa'),
                        metric='abs')]

    def invariant_k():
        rng = np.random.default_rng(config.seed + 4)
        worst = 0.0
        for point, _ in sample_D(model, 100, config.seed + 5):
            k = random_group_element(rng, model, spread=0.0)
            before = point_invariant(point.z, model)
            after = point_invariant(k.act(point.z), model)
            worst = max(worst, abs(after - before) / max(1.0, abs(before)))
        return [_record(suite, 'invariant_k_invariance', 'u(k z) = u(z)', worst, 0.0,
                        config.tolerance('iwasawa'), metric='abs')]

    return [Check(fn.__name__, 'geometry', fn) for fn in (
        iwasawa_roundtrip, separation, incidence, y_coset_roundtrip, h_stabilizer, invariant_k)]


# cauchy-radon

def _xi_point(model, s, t, angle):
    R = np.eye(model.n)
    R[:2, :2] = [[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]
    g = make_generator('k_R', R, model) @ make_generator('a_z', s, model)
    return xi_from_coset(g, t, model)


def cauchy_radon_checks(config: SuiteConfig, packets):
    suite = 'cauchy-radon'
    model = config.rank_one_model
    tol = config.tolerance('cauchy')
    outer = config.quadrature_spec('cauchy_outer')
    inner = config.quadrature_spec('cauchy_inner')
    n_spec = config.quadrature_spec('n')
    checks = []

    for f in packets:
        for point in config.grids['xi']:
            s, t, angle = float(point['s']), float(point['t']), float(point.get('angle', 0.0))

            def cauchy(f=f, s=s, t=t, angle=angle):
                xi = _xi_point(model, s, t, angle)
                direct = cauchy_transform(f, xi, outer=outer, inner=inner)
                spectral = radon_spectral(f, xi)
                label = f"cauchy[{f.name},s={s:g},t={t:g}]"
                anchor = 'C(f)(xi) = 2 pi R(f)(xi) on the two-dimensional hyperboloid'
                records = [_constant(
                    _record(suite, label, anchor, direct.value, CAUCHY_CONSTANT * spectral.value, tol),
                    'cauchy_constant', direct.value / spectral.value)]
                if s == 0.0 and t == 0.0:
                    records.append(_record(suite, f"cayley[{f.name}]", CAYLEY_LABEL, direct.value,
                                           CAUCHY_CONSTANT * spectral.value, tol))
                return records

            checks.append(Check(f"cauchy[{f.name},s={s:g},t={t:g}]", 'Cauchy = 2 pi Radon', cauchy))

        def radon_routes(f=f):
            xi = xi_from_coset(make_generator('a_z', 0.0, model), 0.7, model)
            holo = radon_holomorphic(f, xi, n_spec)
            spectral = radon_spectral(f, xi)
            real_xi = _xi_point(model, 0.4, 0.0, 0.7)
            real = radon_real(f, real_xi, n_spec)
            real_spectral = radon_spectral(f, real_xi)
            a_direct = abel(f, 0.3 + 0.2j, n_spec)
            a_spectral = abel_spectral(f, 0.3 + 0.2j)
            tol_r = config.tolerance('radon_routes')
            return [
                _constant(_record(suite, f"radon_holomorphic[{f.name}]", 'N-integral vs spectral display at t = 0.7',
                                  holo.value, spectral.value, tol_r),
                          'radon_normalization', holo.value / (spectral.value / RADON_NORMALIZATION)),
                _record(suite, f"radon_real[{f.name}]", 'real horosphere N-integral vs spectral display',
                        real.value, real_spectral.value, tol_r),
                _record(suite, f"abel[{f.name}]", 'Abel transform: N-integral vs cosine transform of h',
                        a_direct.value, a_spectral.value, tol_r),
            ]

        checks.append(Check(f"radon_routes[{f.name}]", 'Radon two routes', radon_routes))

        def symmetries(f=f):
            records = []
            g = _xi_point(model, 0.4, 0.0, 0.7).g
            xi = xi_from_coset(g, 0.0, model)
            real = radon_real(f, xi, n_spec).value
            records.append(_record(suite, f"radon_restriction[{f.name}]", 'R(f) at t = 0 is the real Radon transform',
                                   radon_holomorphic(f, xi, n_spec).value, real, config.tolerance('radon_restriction')))

            h = random_group_element(np.random.default_rng(config.seed + 7), model, spread=0.5)
            moved = radon_real(f, xi_from_coset(h @ g, 0.0, model), n_spec, translate=h).value
            records.append(_record(suite, f"radon_equivariance[{f.name}]", 'R(L_h f)(h xi) = R(f)(xi)',
                                   moved, real, config.tolerance('radon_equivariance'),
                                   spectral=complex(radon_spectral(f, xi).value)))

            base = _xi_point(model, 0.2, 0.0, 1.1).g
            for s, t in ((0.4, 0.3), (-0.3, -0.5)):
                shifted = xi_from_coset(base @ make_generator('a_z', s, model), t, model)
                records.append(_record(
                    suite, f"right_a_covariance[{f.name},s={s:g},t={t:g}]",
                    'R(f)(xi a_z) = e^-z int_N f(g n a_z x_o) dn, z = s + i t',
                    radon_holomorphic(f, shifted, n_spec).value, radon_right_a(f, base, complex(s, t), n_spec).value,
                    config.tolerance('right_a_covariance')))

            for w in (0.8, 0.3 + 0.2j):
                records.append(_record(suite, f"abel_weyl_invariance[{f.name},w={w}]", 'A(f)(a_w) = A(f)(a_-w)',
                                       abel(f, w, n_spec).value, abel(f, -w, n_spec).value,
                                       config.tolerance('weyl_invariance')))
            return records

        def cauchy_riemann(f=f):
            z, step = 0.3 + 0.4j, 1e-3

            def F(w):
                return radon_at(f, w, n_spec).value

            d_imag = (F(z + 1j * step) - F(z - 1j * step)) / (2.0 * step)
            d_real = (F(z + step) - F(z - step)) / (2.0 * step)
            return [_record(suite, f"radon_cauchy_riemann[{f.name}]", 'd/dy R(f)(e^z xi_o) = i d/dx, z = x + i y',
                            d_imag, 1j * d_real, config.tolerance('cauchy_riemann'))]

        checks.extend([
            Check(f"radon_symmetries[{f.name}]", 'Radon covariance', symmetries),
            Check(f"radon_cauchy_riemann[{f.name}]", 'Radon holomorphy', cauchy_riemann),
        ])
    return checks


# inversion

def inversion_checks(config: SuiteConfig, packets):
    suite = 'inversion'
    model = config.rank_one_model
    h_spec = config.quadrature_spec('h')
    y_o = QuadricPoint(model.y_o)
    checks = []

    for f in packets:
        def inversion(f=f):
            target = eval_packet(f, y_o, side='D').value
            route_a, route_b = invert(f, y_o, h_spec)
            tol = config.tolerance('inversion')
            anchor = '(L R f)^vee(y_o) = f(y_o)'
            return [
                _record(suite, f"invert_powers[{f.name}]", anchor, route_a.value, target, tol),
                _record(suite, f"invert_dual[{f.name}]", anchor, route_b.value, target, tol),
            ]

        def dual_radon(f=f):
            dual = dual_transform(radon_spectral_phi(f), y_o, model, h_spec)
            spectral = dual_radon_spectral(f)
            return [_constant(
                _record(suite, f"dual_radon[{f.name}]", 'R(f)^vee(y_o) = (pi/2) int h C1 d ell',
                        dual.value, spectral.value, config.tolerance('radon_routes')),
                'dual_normalization', dual.value / (spectral.value / DUAL_NORMALIZATION))]

        def approach(f=f):
            near = boundary_limit(f, y_o, 1e-4).value
            target = eval_packet(f, y_o, side='D').value
            return [_record(suite, f"boundary_limit[{f.name}]", 'f(g a_i(pi/2 - delta) x_o) -> f(y)',
                            near, target, config.tolerance('boundary_limit'))]

        def refinement(f=f):
            reference = invert(f, y_o, h_spec)[0].value
            coarse = h_spec.scaled(1e4)
            fine = coarse.scaled(0.1)
            coarse_error = abs(invert(f, y_o, coarse)[0].value - reference)
            fine_error = abs(invert(f, y_o, fine)[0].value - reference)
            # shrinks 5x unless already inside the finer tolerance
            bound = max(coarse_error / 5.0, 2.0 * fine.rel_tol * abs(reference))
            return [_record(suite, f"invert_refinement[{f.name}]", 'route a error at tol / 10 is 5x smaller',
                            max(0.0, fine_error - bound), 0.0, 0.0, metric='abs',
                            coarse_error=coarse_error, fine_error=fine_error, coarse_tol=coarse.rel_tol)]

        checks.extend([
            Check(f"inversion[{f.name}]", 'inversion', inversion),
            Check(f"invert_refinement[{f.name}]", 'inversion convergence', refinement),
            Check(f"dual_radon[{f.name}]", 'dual transform', dual_radon),
            Check(f"boundary_limit[{f.name}]", 'boundary values', approach),
        ])

    def dual_beta():
        lam = 2.0
        value = dual_transform(horo_power(lam), y_o, model, h_spec).value
        target = cmath.exp(0.25 * math.pi * (lam - 1j)) * 0.5 * cbeta(0.5, 0.25 * (1.0 + 1j * lam))
        return [_record(suite, 'dual_horo_power[lambda=2]', 'H-integral of a(z_H^-1 h)^(rho(1+i lambda))',
                        value, target, config.tolerance('dual_beta'))]

    checks.append(Check('dual_horo_power', 'dual transform closed form', dual_beta))
    return checks


# hardy-norm

def hardy_norm_checks(config: SuiteConfig, packets):
    suite = 'hardy-norm'
    epsilons = tuple(config.grids['epsilons'])
    checks = []

    for f in packets:
        def geometric(f=f):
            norm = hardy_norm_spectral(f).value
            result = hardy_norm_geometric(f, epsilons)
            ordered = [result['grid'][e] for e in sorted(result['grid'], reverse=True)]
            violations = sum(1 for a, b in zip(ordered, ordered[1:]) if b < a)
            violations += sum(1 for v in ordered if v > norm * (1.0 + 1e-12))
            smallest = min(result['grid'])
            return [
                _record(suite, f"geometric_sup[{f.name}]", 'sup of D O(iX) / |W_H| over the grid vs ||f||^2',
                        result['grid'][smallest], norm, config.tolerance('geometric_norm'),
                        grid={str(k): v for k, v in result['grid'].items()}),
                _record(suite, f"geometric_monotone[{f.name}]", 'D O(iX) increases towards the edge, below ||f||^2',
                        violations, 0, 0.0, metric='abs'),
                _record(suite, f"geometric_extrapolated[{f.name}]", 'Richardson limit eps -> 0 vs ||f||^2',
                        result['extrapolated'], norm, config.tolerance('extrapolation')),
            ]

        def gutzmer(f=f):
            ratios = []
            for X in config.grids['X']:
                direct = orbital_direct(f, X).value
                spectral = orbital_spectral(f, X).value
                ratios.append(direct / spectral)
            magnitudes = np.abs(ratios)
            return [_record(suite, f"gutzmer_ratio[{f.name}]", 'G-orbit integral / spectral Gutzmer sum',
                            float(np.max(magnitudes)), float(np.min(magnitudes)), config.tolerance('gutzmer'),
                            ratios=[complex(r) for r in ratios])]

        def diagram(f=f):
            records = []
            for ell in config.grids['lambda_ells']:
                numeric, exact = lambda_fourier_check(f, ell)
                inv_c = c_reciprocal(-1j * ell)
                recovered = numeric / inv_c
                records.append(_constant(
                    _record(suite, f"lambda_diagram[{f.name},ell={ell:g}]", 'F_A(Lambda f) = h / c(-i ell)',
                            numeric, exact, config.tolerance('lambda_diagram')),
                    'abel_fourier_normalization', ABEL_FOURIER_NORMALIZATION * recovered / complex(f.profile(ell))))
            return records

        def covariance(f=f):
            tube = lambda_map(f)
            lams = np.linspace(-tube.radius, tube.radius, 101)[:, None]
            defect = tau_defect(tube, lambda_multiplier(), lams)
            return [_record(suite, f"lambda_tau_covariance[{f.name}]", 'F(-lam) = m(eps, -lam) F(lam)',
                            defect, 0.0, config.tolerance('tau_covariance'), metric='abs')]

        checks.extend([
            Check(f"geometric[{f.name}]", 'geometric Hardy norm', geometric),
            Check(f"gutzmer[{f.name}]", 'Gutzmer', gutzmer),
            Check(f"lambda_diagram[{f.name}]", 'Lambda diagram', diagram),
            Check(f"lambda_covariance[{f.name}]", 'Lambda covariance', covariance),
        ])

    def lambda_ratio():
        strip = strip_model()
        ratios = []
        for f in packets:
            tube_norm, _ = tube_hardy_norm(lambda_map(f), strip)
            ratios.append(tube_norm / hardy_norm_spectral(f).value)
        record = _record(suite, 'lambda_norm_ratio', '||Lambda f||^2 / ||f||^2 constant over packets',
                         max(ratios), min(ratios), config.tolerance('lambda_ratio'), ratios=ratios)
        return [_constant(record, 'lambda_norm_ratio', float(np.mean(ratios)))]

    checks.append(Check('lambda_norm_ratio', 'Lambda isometry', lambda_ratio))
    return checks


# kernels

def kernel_checks(config: SuiteConfig, packets):
    suite = 'kernels'
    model = config.rank_one_model
    points = [p for p, _ in sample_D(model, int(config.grids['kernel_points']), config.seed + 6,
                                     x_max=0.5, spread=0.5)]
    checks = []

    for f in packets:
        def reproducing(f=f):
            records = []
            for i, w in enumerate(points):
                records.append(_record(suite, f"reproducing[{f.name},w{i}]", '<f, K_w> = f(w)',
                                       kernel_pairing(f, w).value, eval_packet(f, w).value,
                                       config.tolerance('kernel_reproducing')))
            return records

        checks.append(Check(f"reproducing[{f.name}]", 'reproducing kernel', reproducing))

    def gram():
        matrix = kernel_gram(points)
        eigenvalues = np.linalg.eigvalsh(matrix)
        negative = max(0.0, -float(np.min(eigenvalues)))
        return [_record(suite, 'gram_positive', 'Gram matrix of K is positive semidefinite', negative, 0.0,
                        1e-10 * float(np.max(np.abs(eigenvalues))), metric='abs',
                        eigenvalues=[float(e) for e in eigenvalues])]

    def hermitian():
        z, w = points[0], points[-1]
        return [_record(suite, 'kernel_hermitian', 'K(z, w) = conj K(w, z)', reproducing_kernel(z, w).value,
                        np.conj(reproducing_kernel(w, z).value), 1e-10)]

    checks.extend([Check('gram_positive', 'Gram positivity', gram),
                   Check('kernel_hermitian', 'Hermitian kernel', hermitian)])
    return checks


# tube

def tube_checks(config: SuiteConfig, packets):
    suite = 'tube'
    strip = strip_model()
    trivial = trivial_multiplier(strip)
    points = [complex(re, im) for re, im in config.grids['tube_points']]

    def closed_form():
        records = []
        worst = (0.0, 0.0, 0.0)
        for z in points:
            for w in points:
                value, _ = tube_kernel(z, w, trivial, strip)
                exact = tube_kernel_closed_form(z, w)
                rel = abs(value - exact) / max(abs(exact), 1e-300)
                if rel >= worst[0]:
                    worst = (rel, value, exact)
        records.append(_record(suite, 'strip_kernel_closed_form', 'strip Cauchy-Szego kernel closed form',
                               worst[1], worst[2], config.tolerance('tube_closed_form'), pairs=len(points) ** 2))
        origin, _ = tube_kernel(0.0, 0.0, trivial, strip)
        records.append(_constant(
            _record(suite, 'strip_kernel_origin', 'K(0, 0) = sqrt(pi/2) / 2', origin,
                    tube_kernel_closed_form(0.0, 0.0), config.tolerance('tube_closed_form')),
            'tube_kernel_origin', origin))
        return records

    def reproducing():
        F = gaussian_tube(1.0)
        w = 0.4j
        pairing, _ = tube_inner(F, tube_kernel_spectral(w, trivial, strip), strip)
        value, _ = tube_eval(F, w, strip)
        return [_record(suite, 'strip_reproducing', '<F, K_w> = f(w) at w = 0.4i', pairing, value,
                        config.tolerance('tube_reproducing'))]

    def convexity():
        violations = 0
        lam = np.linspace(-10.0, 10.0, 201)
        for y in np.linspace(-0.99, 0.99, 41):
            violations += int(np.sum(tube_cosh(y, lam, strip) > tube_cosh(strip.y_o, lam, strip) * (1 + 1e-14)))
        plane = sign_flip_model()
        grid = np.stack(np.meshgrid(lam[::10], lam[::10], indexing='ij'), axis=-1)
        for y1 in np.linspace(-0.95, 0.95, 9):
            for y2 in np.linspace(-0.95, 0.95, 9):
                inner = tube_cosh((y1, y2), grid, plane)
                outer = tube_cosh(plane.y_o, grid, plane)
                violations += int(np.sum(inner > outer * (1 + 1e-14)))
        return [_record(suite, 'cosh_y_below_cosh', 'COSH_y <= COSH on Omega', violations, 0, 0.0, metric='abs')]

    def gaussian_norm():
        records = []
        for sigma in (0.5, 1.0):
            value, _ = tube_hardy_norm(gaussian_tube(sigma), strip)
            exact = (2.0 * math.pi) ** -0.5 * sigma * math.sqrt(math.pi) * math.exp(sigma ** 2)
            records.append(_record(suite, f"gaussian_norm[sigma={sigma:g}]", 'int |F|^2 COSH for a gaussian',
                                   value, exact, config.tolerance('tube_norm')))
        return records

    def sup_route():
        F = gaussian_tube(1.0)
        norm, _ = tube_hardy_norm(F, strip)
        values = tube_norm_sup(F, strip, epsilons=(0.2, 0.1, 0.05))
        above = sum(1 for v in values.values() if v > norm * (1.0 + 1e-8))
        upper = [values[y] for y in sorted(values) if y[0] > 0]
        not_monotone = sum(1 for a, b in zip(upper, upper[1:]) if b < a)
        return [_record(suite, 'sup_route', 'sup over y of slice norms <= COSH route, increasing to it',
                        above + not_monotone, 0, 0.0, metric='abs',
                        values={str(k): v for k, v in values.items()}, norm=norm)]

    def cocycle():
        m = lambda_multiplier()
        lams = np.linspace(-12.0, 12.0, 97)[:, None]
        return [
            _record(suite, 'lambda_cocycle', 'm(sw, lam) = m(s, w lam) m(w, lam)', m.cocycle_defect(lams), 0.0,
                    config.tolerance('tau_covariance'), metric='abs'),
            _record(suite, 'lambda_unimodular', '|m(s, lam)| = 1', m.modulus_defect(lams), 0.0,
                    config.tolerance('tau_covariance'), metric='abs'),
        ]

    def projection():
        m = lambda_multiplier()
        F = gaussian_tube(1.0, phase=[0.3])
        once = project_tau_invariant(F, m)
        twice = project_tau_invariant(once, m)
        lams = np.linspace(-8.0, 8.0, 81)[:, None]
        defect = float(np.max(np.abs(twice(lams) - once(lams))))
        return [
            _record(suite, 'tau_projection_idempotent', 'P P F = P F', defect, 0.0,
                    config.tolerance('tau_covariance'), metric='abs'),
            _record(suite, 'tau_projection_invariant', 'tau(s) P F = P F', tau_defect(once, m, lams), 0.0,
                    config.tolerance('tau_covariance'), metric='abs'),
        ]

    def plane_kernel():
        plane = sign_flip_model()
        z = np.array([0.2 + 0.1j, -0.3 + 0.2j])
        w = np.array([0.1 - 0.2j, 0.4 + 0.1j])
        value, _ = tube_kernel(z, w, trivial_multiplier(plane), plane, PLANE_KERNEL_QUAD)
        exact = tube_kernel_closed_form(z[0], w[0]) * tube_kernel_closed_form(z[1], w[1])
        return [_record(suite, 'sign_flip_product_kernel', 'd = 2 sign-flip kernel = product of strip kernels',
                        value, exact, 1e-6, experimental=True)]

    return [Check(fn.__name__, 'tube Hardy space', fn) for fn in (
        closed_form, reproducing, convexity, gaussian_norm, sup_route, cocycle, projection, plane_kernel)]


SUITES = {
    'specfun': specfun_checks,
    'geometry': geometry_checks,
    'cauchy-radon': cauchy_radon_checks,
    'inversion': inversion_checks,
    'hardy-norm': hardy_norm_checks,
    'kernels': kernel_checks,
    'tube': tube_checks,
}
PACKET_FREE = ('specfun', 'geometry', 'tube')


def list_suites():
    return list(SUITE_NAMES) + ['all']


def run_check(check: Check, suite):
    """Run one check; returns (records, error) and never raises."""
    start = time.time()
    try:
        records = check.run()
        elapsed = time.time() - start
        for r in records:
            r.wall_time = elapsed
        return records, None
    except Exception as e:
        logger.debug("check %s failed", check.name, exc_info=True)
        return [failed_record(suite, check.name, check.anchor, f"Error in {check.name}: {str(e)}",
                              time.time() - start)], f"{type(e).__name__}: {str(e)}"


def build_checks(name, config: SuiteConfig):
    """(suite, Check) pairs for one suite or for 'all'."""
    if name == 'all':
        names = [s for s in SUITE_NAMES if s in config.suites or 'all' in config.suites]
    elif name in SUITES:
        names = [name]
    else:
        raise UnknownSuite(f"unknown suite {name!r}; available: {', '.join(list_suites())}")
    packets = None
    pairs = []
    for suite in names:
        if suite not in PACKET_FREE and packets is None:
            packets = config.build_packets()
        pairs.extend((suite, check) for check in SUITES[suite](config, packets))
    return pairs


def run_suite(name, config: SuiteConfig, max_workers=None, progress=None):
    """Execute a suite and return its Report.

    ``progress(index, total, suite, check, records, error)`` is called as checks complete.
    Raises ConfigInvalid (including UnknownSuite) before any check runs.
    """
    pairs = build_checks(name, config)
    workers = max_workers or config.max_workers
    report = Report(name, metadata={
        'version': __version__,
        'seed': config.seed,
        'config_hash': config_hash(config),
        'started': datetime.now().isoformat(timespec='seconds'),
    })
    measured = {}
    completed = 0

    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {}
        for suite, check in pairs:
            future = executor.submit(run_check, check, suite)
            futures[future] = (suite, check)

        for future in as_completed(futures):
            suite, check = futures[future]
            records, error = future.result()
            completed += 1
            report.records.extend(records)
            for r in records:
                for key, value in r.metadata.pop('constants', {}).items():
                    measured.setdefault(key, []).append(((r.suite, r.check), complex(value)))
            if progress is not None:
                progress(completed, len(pairs), suite, check, records, error)

    for key in sorted(measured):
        report.constants()[key] = _mean_constant(measured[key])
    report.records.extend(compare_golden(report, config.tolerance('golden')))
    return report.sort()
