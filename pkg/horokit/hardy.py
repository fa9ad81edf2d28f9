#!/usr/bin/env python3
"""
Hardy space H^2(D)_00 of K-invariant holomorphic functions on the crown.

Norm, inner product and reproducing kernel are spectral:
    ||f||^2 = int_0^inf |h(ell)|^2 COSH(ell) p(ell) d ell,  COSH = 2 cosh(pi ell / 2),
    K(z, w) = int_0^inf phi_ell(z) phi_ell(conj w) p(ell) / COSH(ell) d ell.
The geometric route recovers the norm from orbital integrals of |f|^2 through
the operator D evaluated towards the edge of the tube.
"""

import logging
import math

import numpy as np

from horokit.errors import ConfigInvalid, NonConvergence
from horokit.geometry import QuadricPoint
from horokit.numerics import QuadratureSpec, gauss_legendre, integrate, line
from horokit.spectra import (
    WEYL_H_ORDER,
    c_reciprocal,
    cosh_weight,
    d_operator,
    mu_weight,
    plancherel_density,
    spherical_fn,
)
from horokit.transforms import TransformResult, WavePacket, abel_fourier
from horokit.tube_hardy import TubeFunction, lambda_multiplier

logger = logging.getLogger(__name__)

GEOMETRIC_EPSILONS = (0.2, 0.1, 0.05)
ORBIT_THETA_NODES = 40
KERNEL_EXPONENT = 37.0
KERNEL_MAX_ELL = 400.0

ORBIT_QUAD = line(0.0, math.inf, rel_tol=1e-9, abs_tol=1e-14, tail_cutoff=40.0,
                  decay_rate=1.0, max_subdivisions=2000)
KERNEL_QUAD = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15, max_subdivisions=4000)


def hardy_norm_spectral(f: WavePacket):
    """||f||^2_H: the squared Hardy norm from the profile."""
    value, err = f.spectral(lambda ell: np.conj(f.profile(ell)) * cosh_weight(ell) * plancherel_density(ell))
    return TransformResult(value.real, err, 'spectral')


def norm_on_real_form(f: WavePacket):
    """||f|_X||^2 = int_0^inf |h|^2 p d ell."""
    value, err = f.spectral(lambda ell: np.conj(f.profile(ell)) * plancherel_density(ell))
    return TransformResult(value.real, err, 'spectral')


def hardy_inner_spectral(first, second, radius=None, spec=KERNEL_QUAD):
    """<F1, F2>_H = int_0^inf F1(ell) conj(F2(ell)) COSH(ell) p(ell) d ell for spectral functions F1, F2."""
    radius = radius or KERNEL_MAX_ELL
    value, err = integrate(lambda ell: first(ell) * np.conj(second(ell)) * cosh_weight(ell) * plancherel_density(ell),
                           spec.on((0.0, radius)))
    return value, err


def _kernel_decay(u):
    """Exponential rate of phi_ell(u) in ell: |Im arccosh(u)| / 2."""
    return abs(np.arccosh(complex(u)).imag) / 2.0


def kernel_spectral(point: QuadricPoint):
    """h(K_w)(ell) = phi_ell(conj w) / COSH(ell): the spectral function of the kernel at w."""
    u = np.conj(point.invariant)

    def profile(ell):
        return spherical_fn(ell, u, side='D') / cosh_weight(ell)
    return profile


def reproducing_kernel(z: QuadricPoint, w: QuadricPoint, spec=KERNEL_QUAD):
    """K(z, w) = int_0^inf phi_ell(z) phi_ell(conj w) p / COSH d ell.

    Raises:
        NonConvergence: z and w together reach the edge of the crown, so the
            integrand no longer decays.
    """
    uz, uw = z.invariant, np.conj(w.invariant)
    rate = 0.5 * math.pi - _kernel_decay(uz) - _kernel_decay(uw)
    if rate <= 0:
        raise NonConvergence("kernel integrand does not decay: points too close to the edge of the crown")
    radius = min(KERNEL_EXPONENT / rate, KERNEL_MAX_ELL)
    value, err = integrate(
        lambda ell: (spherical_fn(ell, uz, side='D') * spherical_fn(ell, uw, side='D')
                     * mu_weight(ell)),
        spec.on((0.0, radius)))
    return TransformResult(value, err, 'spectral')


def kernel_gram(points, spec=KERNEL_QUAD):
    """Gram matrix G_jk = K(z_j, z_k); Hermitian positive semidefinite."""
    size = len(points)
    gram = np.empty((size, size), dtype=complex)
    for j in range(size):
        for k in range(j, size):
            value = reproducing_kernel(points[j], points[k], spec).value
            gram[j, k] = value
            gram[k, j] = np.conj(value)
    return gram


def kernel_pairing(f: WavePacket, w: QuadricPoint):
    """<f, K_w>_H computed spectrally; equals f(w) by the reproducing property."""
    value, err = hardy_inner_spectral(f.profile, kernel_spectral(w), f.radius)
    return TransformResult(value, err, 'spectral')


def orbital_spectral(f: WavePacket, X):
    """O_{|f|^2}(iX) = int_0^inf |h|^2 phi_ell(cos X) p d ell for |X| < pi."""
    if not abs(X) < math.pi:
        raise ConfigInvalid("orbital integrals need |X| < pi")
    u = math.cos(X)
    value, err = f.spectral(
        lambda ell: np.conj(f.profile(ell)) * spherical_fn(ell, u) * plancherel_density(ell))
    return TransformResult(value, err, 'spectral')


def orbital_direct(f: WavePacket, X, spec=ORBIT_QUAD, theta_nodes=ORBIT_THETA_NODES):
    """Unnormalized G-integral int_G |f(g exp(iX/2) x_o)|^2 dg in K A+ K coordinates.

    For K-invariant f only the A+ K part survives: the point a_r k_theta a_{iX/2} x_o
    has invariant u = cosh r cos(X/2) + i sinh r sin(X/2) cos(theta), and the
    density is sinh r. The overall Haar constant is calibrated by the caller.
    """
    if not abs(X) < math.pi:
        raise ConfigInvalid("orbital integrals need |X| < pi")
    half = 0.5 * X
    theta, weights = gauss_legendre(theta_nodes, 0.0, math.pi)
    cos_t = np.cos(theta)

    def integrand(r):
        r = np.asarray(r, dtype=float)
        u = (np.cosh(r)[..., None] * math.cos(half)
             + 1j * np.sinh(r)[..., None] * math.sin(half) * cos_t)
        vals = np.abs(f.values_at(u)) ** 2
        return (vals @ weights) * np.sinh(r)

    value, err = integrate(integrand, spec)
    return TransformResult(value, err, 'G-quadrature')


def orbital_integral(f: WavePacket, X, route='spectral'):
    """O_{|f|^2}(iX); route 'spectral' (Gutzmer) or 'direct' (uncalibrated G-quadrature)."""
    if route == 'spectral':
        return orbital_spectral(f, X)
    if route == 'direct':
        return orbital_direct(f, X)
    raise ConfigInvalid(f"unknown orbital route {route!r}")


def d_orbital(f: WavePacket, X):
    """D applied to the orbital integral at the tube point iX: int |h|^2 2 cosh(ell X / 2) p d ell."""
    value, err = d_operator(lambda ell: np.abs(f.profile(ell)) ** 2, 1j * X, radius=f.radius)
    return TransformResult(value.real, err, 'spectral')


def hardy_norm_geometric(f: WavePacket, epsilons=GEOMETRIC_EPSILONS):
    """Geometric route: sup over the grid X = (1 - eps) pi of D O(iX) / |W_H|, then
    Richardson extrapolation eps -> 0.

    Returns a dict with the grid values, their maximum, its argmax and the
    extrapolated value.
    """
    eps = sorted(float(e) for e in epsilons)[::-1]
    if len(eps) < 2 or any(not 0.0 < e < 1.0 for e in eps):
        raise ConfigInvalid("epsilons must contain at least two values in (0, 1)")
    grid = {e: d_orbital(f, (1.0 - e) * math.pi).value / WEYL_H_ORDER for e in eps}
    table = [grid[e] for e in eps]
    # Neville table for halving steps: linear terms first, then quadratic.
    level = table
    order = 1
    while len(level) > 1:
        factor = 2.0 ** order
        level = [(factor * level[i + 1] - level[i]) / (factor - 1.0) for i in range(len(level) - 1)]
        order += 1
    best_eps = max(grid, key=grid.get)
    return {
        'grid': grid,
        'sup': grid[best_eps],
        'argmax_eps': best_eps,
        'extrapolated': level[0],
    }


def lambda_map(f: WavePacket):
    """Lambda f as a one-dimensional tube function: F(lam) = h(ell) / c(-i ell), ell = 4 lam / pi.

    The tube coordinate w = 2 s / pi maps T(Omega_H) onto T((-1, 1)).
    """
    scale = 4.0 / math.pi

    def profile(lam):
        ell = scale * np.asarray(lam, dtype=float)[..., 0]
        return f.profile(np.abs(ell)) * c_reciprocal(-1j * ell)

    return TubeFunction(profile=profile, dim=1, radius=f.radius / scale,
                        multiplier=lambda_multiplier(), name=f"lambda({f.name})")


def lambda_fourier_check(f: WavePacket, ell):
    """Both sides of F_A(Lambda f)(ell) = h(ell) / c(-i ell).

    Left: the Abel transform Fourier-inverted numerically, then divided by c(-i ell).
    Right: the profile divided by c(-i ell).
    """
    numeric = abel_fourier(f, ell)
    inv_c = c_reciprocal(-1j * ell)
    return numeric.value * inv_c, complex(f.profile(ell)) * inv_c


def abel_fourier_link(f: WavePacket, ell):
    """Both sides of h(ell) = F_A(A f)(ell): the A-line Fourier transform of the Abel transform, and the profile."""
    result = abel_fourier(f, ell)
    return result, complex(f.profile(ell))
