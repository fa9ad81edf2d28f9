#!/usr/bin/env python3
"""
Spectral-side scalar functions for the rank-one models.

Everything is written in rho-coordinates: the spectral parameter is the real
number ell with lambda = i * ell * rho, and for SL(2,R) rho(Z) = 1/2. Spectral
integrals run over ell in [0, inf) against the Plancherel density
p(ell) = (pi ell / 2) tanh(pi ell / 2); for even profiles this is half the
integral over the whole line.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from horokit.errors import BranchCutHit, ConfigInvalid, NonFinite
from horokit.geometry import RankOneModel
from horokit.numerics import (
    QuadratureSpec,
    cbeta,
    cgamma,
    ensure_finite,
    gauss_legendre,
    hyp_series,
    integrate,
    line,
    rgamma,
)

logger = logging.getLogger(__name__)

SL2_MODEL = RankOneModel(2)
WEYL_H_ORDER = 1
REGION_THRESHOLD = 0.9
REGION_MAX_TERMS = 800
LEGENDRE_MAX_TERMS = 8000
SMALL_ELL = 1e-3
G_TAYLOR_CUTOFF = 1e-3
K_INTEGRAL_NODES = 400
PROFILE_FAMILIES = ('gaussian', 'gaussian_poly', 'gaussian_pair')

DEFAULT_SPECTRAL_QUAD = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-15, max_subdivisions=4000)


@dataclass(frozen=True)
class SpectralParam:
    ell: float

    def __post_init__(self):
        if not math.isfinite(self.ell):
            raise NonFinite("spectral parameter must be finite")

    @property
    def lam(self):
        """lambda = i * ell * rho, as a multiple of rho."""
        return 1j * self.ell


@dataclass(frozen=True)
class SpectralProfile:
    """Even, gaussian-decaying spectral profile h(ell).

    Families:
        gaussian       exp(-ell^2 / (2 sigma^2))
        gaussian_poly  exp(-ell^2 / (2 sigma^2)) * sum_k c_k ell^(2k)
        gaussian_pair  exp(-(ell - center)^2 / (2 sigma^2)) + exp(-(ell + center)^2 / (2 sigma^2))
    ``parts`` holds summands when profiles are added together.
    """
    family: str = 'gaussian'
    sigma: float = 1.0
    coefficients: tuple = (1.0,)
    center: float = 0.0
    scale: complex = 1.0
    parts: tuple = ()

    def __post_init__(self):
        if not self.parts:
            if self.family not in PROFILE_FAMILIES:
                raise ConfigInvalid(f"unknown profile family '{self.family}'")
            if self.sigma <= 0:
                raise ConfigInvalid("profile sigma must be positive")

    def __call__(self, ell):
        ell = np.asarray(ell, dtype=float)
        if self.parts:
            return sum(p(ell) for p in self.parts)
        s2 = 2.0 * self.sigma ** 2
        if self.family == 'gaussian_pair':
            out = np.exp(-(ell - self.center) ** 2 / s2) + np.exp(-(ell + self.center) ** 2 / s2)
        else:
            out = np.exp(-ell ** 2 / s2)
            if self.family == 'gaussian_poly':
                out = out * np.polynomial.polynomial.polyval(ell ** 2, self.coefficients)
        return self.scale * out

    def __add__(self, other):
        mine = self.parts or (self,)
        theirs = other.parts or (other,)
        return SpectralProfile(family='sum', parts=mine + theirs)

    def support_radius(self):
        """Radius beyond which the profile is below double precision relevance."""
        if self.parts:
            return max(p.support_radius() for p in self.parts)
        extra = 2.0 * len(self.coefficients) if self.family == 'gaussian_poly' else 0.0
        return abs(self.center) + (12.0 + extra) * self.sigma

    def decay_rate(self):
        """Exponential decay rate valid beyond the support radius."""
        sigma = max(p.sigma for p in self.parts) if self.parts else self.sigma
        return self.support_radius() / sigma ** 2

    def is_even(self, grid):
        return bool(np.allclose(self(grid), self(-np.asarray(grid)), rtol=0, atol=1e-14))


def plancherel_density(ell):
    """(pi ell / 2) tanh(pi ell / 2) = |c(i ell)|^{-2}."""
    ell = np.asarray(ell, dtype=float)
    out = 0.5 * np.pi * ell * np.tanh(0.5 * np.pi * ell)
    return float(out) if out.ndim == 0 else out


def c_function(lam):
    """Harish-Chandra c(lambda) = pi^{-1/2} Gamma(lambda/2) / Gamma((lambda+1)/2)."""
    lam = np.asarray(lam, dtype=complex)
    out = cgamma(0.5 * lam) * rgamma(0.5 * (lam + 1.0)) / math.sqrt(math.pi)
    return complex(out) if np.ndim(out) == 0 else out


def c_reciprocal(lam):
    """1 / c(lambda) = pi^{1/2} Gamma((lambda+1)/2) / Gamma(lambda/2); vanishes at lambda = 0."""
    lam = np.asarray(lam, dtype=complex)
    out = math.sqrt(math.pi) * cgamma(0.5 * (lam + 1.0)) * rgamma(0.5 * lam)
    return complex(out) if np.ndim(out) == 0 else out


def plancherel_gamma_route(ell):
    """1/|c(i ell)|^2 from the Gamma formula; 0 at ell = 0."""
    ell = np.asarray(ell, dtype=float)
    safe = np.where(ell == 0, 1.0, ell)
    out = np.where(ell == 0, 0.0, 1.0 / np.abs(c_function(1j * safe)) ** 2)
    return float(out) if out.ndim == 0 else out


def cosh_weight(ell, model=SL2_MODEL):
    """COSH(lambda) = sum over W/W_H of z_H^{2 w lambda} = 2 cosh(pi ell rho(Z))."""
    ell = np.asarray(ell, dtype=float)
    out = 2.0 * np.cosh(np.pi * ell * model.rho)
    return float(out) if out.ndim == 0 else out


def mu_weight(ell, model=SL2_MODEL):
    """Density of the Hardy measure: plancherel / COSH."""
    return plancherel_density(ell) / cosh_weight(ell, model)


def _region_moduli(q):
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.stack([
            np.abs(1.0 - q),
            np.abs(q),
            np.abs(1.0 - 1.0 / q),
            np.abs(1.0 / q),
            np.abs(1.0 / (1.0 - q)),
        ])


def _arg_u2_minus_1(u):
    """Argument of u^2 - 1, continued from Re u > 0 onto the imaginary axis."""
    re = u.real ** 2 - u.imag ** 2 - 1.0
    im = 2.0 * u.real * u.imag
    angle = np.arctan2(im, re)
    on_cut = (im == 0) & (re < 0)
    return np.where(on_cut, np.pi * np.sign(u.imag), angle)


def _phi_regions(ell, u, region):
    """Evaluate phi on one region; ell has shape (L, 1), u shape (1, U)."""
    a = 0.25 * (1.0 + 1j * ell)
    b = 0.25 * (1.0 - 1j * ell)
    q = u * u
    mt = REGION_MAX_TERMS
    if region == 0:
        return hyp_series(a, b, 1.0, 1.0 - q, mt)
    if region == 1:
        first = math.sqrt(math.pi) * rgamma(1.0 - a) * rgamma(1.0 - b) * hyp_series(a, b, 0.5, q, mt)
        second = u * cgamma(-0.5) * rgamma(a) * rgamma(b) * hyp_series(1.0 - a, 1.0 - b, 1.5, q, mt)
        return first + second
    if region == 2:
        return u ** (-2.0 * a) * hyp_series(a, 1.0 - b, 1.0, 1.0 - 1.0 / q, mt)
    if region == 3:
        half = 0.5j * ell
        first = cgamma(-half) * rgamma(1.0 - a) * rgamma(b) * hyp_series(a, 1.0 - b, 1.0 + half, 1.0 / q, mt)
        second = (u ** (1j * ell) * cgamma(half) * rgamma(a) * rgamma(1.0 - b)
                  * hyp_series(1.0 - a, b, 1.0 - half, 1.0 / q, mt))
        return u ** (-2.0 * a) * (first + second)
    half = 0.5j * ell
    w = 1.0 / (1.0 - q)
    log_mod = np.log(np.abs(q - 1.0))
    log_base = log_mod + 1j * _arg_u2_minus_1(u)
    first = (cgamma(-half) * rgamma(b) * rgamma(1.0 - a) * np.exp(-a * log_base)
             * hyp_series(a, a, 1.0 + half, w, mt))
    second = (cgamma(half) * rgamma(a) * rgamma(1.0 - b) * np.exp(-b * log_base)
              * hyp_series(b, b, 1.0 - half, w, mt))
    return first + second


def _phi_legendre(ell, u):
    """Real u in (-1, 1]: P_nu(u) = 2F1(-nu, nu + 1; 1; (1 - u)/2), nu = -1/2 + i ell/2.

    The parameters are complex conjugates, so every term is non-negative for
    u < 1 and the sum stays accurate for large ell.
    """
    return hyp_series(0.5 * (1.0 - 1j * ell), 0.5 * (1.0 + 1j * ell), 1.0, 0.5 * (1.0 - u), LEGENDRE_MAX_TERMS)


def _phi_log_regions(ell, u, region):
    """Regions with Gamma(i ell/2) factors: replace |ell| < SMALL_ELL by an even fit."""
    small = np.abs(ell[:, 0]) < SMALL_ELL
    out = np.empty((ell.shape[0], u.shape[1]), dtype=complex)
    if np.any(~small):
        out[~small] = _phi_regions(ell[~small], u, region)
    if np.any(small):
        d = np.array([[SMALL_ELL], [2.0 * SMALL_ELL]])
        f1, f2 = _phi_regions(d, u, region)
        curvature = (f2 - f1) / (3.0 * SMALL_ELL ** 2)
        base = f1 - curvature * SMALL_ELL ** 2
        out[small] = base[None, :] + curvature[None, :] * (ell[small] ** 2)
    return out


def spherical_fn(ell, u, model=SL2_MODEL, side=None):
    """Spherical function phi_ell at the point with invariant u = z.x_o.

    phi_ell(u) = 2F1((1+i ell)/4, (1-i ell)/4; 1; 1 - u^2), analytically continued
    from Re u > 0 (which contains the crown). Points with Re u = 0 (the boundary
    Y) need ``side='D'``; the value is then the limit from the crown. Real
    u in (-1, 1] uses the Legendre form in (1 - u)/2, which also reaches the
    points exp(iX).x_o with pi/2 < |X| < pi.
    Returns an array of shape (len(ell), len(u)), squeezed for scalar inputs.

    Raises:
        BranchCutHit: Re u < 0 off the real segment (-1, 0), or Re u = 0
            without side='D'.
    """
    if model.n != 2:
        raise ConfigInvalid("spherical functions are implemented for the n = 2 model")
    ell_arr = np.atleast_1d(np.asarray(ell, dtype=float)).ravel()
    u_arr = np.atleast_1d(np.asarray(u, dtype=complex))
    scale = np.maximum(1.0, np.abs(u_arr))
    on_axis = np.abs(u_arr.real) <= 1e-14 * scale
    legendre = (np.abs(u_arr.imag) <= 1e-15 * scale) & (u_arr.real > -1.0) & (u_arr.real <= 1.0)
    if np.any((u_arr.real < 0) & ~on_axis & ~legendre):
        raise BranchCutHit("spherical function requested with Re u < 0")
    if np.any(on_axis) and side != 'D':
        raise BranchCutHit("boundary point on Re u = 0 needs side='D'")
    u_arr = np.where(on_axis, 1j * u_arr.imag, u_arr)

    q = u_arr * u_arr
    moduli = _region_moduli(q)
    with np.errstate(invalid='ignore'):
        moduli = np.where(np.isfinite(moduli), moduli, np.inf)
    region = np.argmin(moduli, axis=0)
    best = np.min(moduli, axis=0)

    out = np.empty((ell_arr.size, u_arr.size), dtype=complex)
    L = ell_arr[:, None]
    fallback = (best > REGION_THRESHOLD) & ~legendre
    if np.any(legendre):
        out[:, legendre] = _phi_legendre(L, u_arr[legendre].real[None, :])
    if np.any(fallback):
        out[:, fallback] = spherical_fn_integral(ell_arr, u_arr[fallback])
    for r in range(5):
        cols = (region == r) & ~fallback & ~legendre
        if not np.any(cols):
            continue
        logger.debug("spherical_fn: region %d for %d points", r, int(cols.sum()))
        U = u_arr[cols][None, :]
        if r in (3, 4):
            out[:, cols] = _phi_log_regions(L, U, r)
        else:
            out[:, cols] = _phi_regions(L, U, r)
    ensure_finite(out, "spherical function")
    if np.ndim(ell) == 0 and np.ndim(u) == 0:
        return complex(out[0, 0])
    if np.ndim(ell) == 0:
        return out[0]
    if np.ndim(u) == 0:
        return out[:, 0].reshape(np.shape(ell))
    return out


def spherical_fn_integral(ell, u, nodes=K_INTEGRAL_NODES):
    """K-integral route: average over K of a(k.z)^{-(lambda + rho)}.

    For z = a_w x_o with cosh w = u, the A-part of k_theta.z is
    e^{-w(k z)} = u - sinh(w) cos(theta); the average over theta in [0, pi]
    of its -(1 + i ell)/2 power is phi_ell(u). Requires Re u > 0.
    """
    ell_arr = np.atleast_1d(np.asarray(ell, dtype=float))
    u_arr = np.atleast_1d(np.asarray(u, dtype=complex))
    theta, weights = gauss_legendre(nodes, 0.0, np.pi)
    sinh_w = np.sqrt(u_arr * u_arr - 1.0)
    base = u_arr[:, None] - sinh_w[:, None] * np.cos(theta)[None, :]
    log_base = np.log(base)
    expo = -0.5 * (1.0 + 1j * ell_arr)
    vals = np.exp(expo[:, None, None] * log_base[None, :, :])
    out = (vals @ weights) / np.pi
    if np.ndim(ell) == 0 and np.ndim(u) == 0:
        return complex(out[0, 0])
    return out


def phi_at_y_o(ell):
    """Closed form phi_ell(y_o) = 2F1(a, b; 1; 1) = 2 / B((3 - i ell)/4, (3 + i ell)/4)."""
    ell = np.asarray(ell, dtype=float)
    out = 2.0 / cbeta(0.25 * (3.0 - 1j * ell), 0.25 * (3.0 + 1j * ell))
    return complex(out) if np.ndim(out) == 0 else out


def dual_constants(ell):
    """(C1, C2) from Gamma/Beta products only.

    C1 = e^{(pi/4)(ell - i)} B(1/2, (1 + i ell)/4) + e^{-(pi/4)(ell + i)} B(1/2, (1 - i ell)/4)
    C2 = phi_ell(y_o) / |c(i ell)|^2
    """
    ell = np.asarray(ell, dtype=float)
    c1 = (np.exp(0.25 * np.pi * (ell - 1j)) * cbeta(0.5, 0.25 * (1.0 + 1j * ell))
          + np.exp(-0.25 * np.pi * (ell + 1j)) * cbeta(0.5, 0.25 * (1.0 - 1j * ell)))
    c2 = phi_at_y_o(ell) * plancherel_gamma_route(ell)
    if np.ndim(c1) == 0:
        return complex(c1), complex(c2)
    return c1, c2


def c1_normalized(ell):
    """C1 divided by Gamma(1/2) / (Gamma(3/4 - i ell/4) Gamma(3/4 + i ell/4))."""
    ell = np.asarray(ell, dtype=float)
    c1, _ = dual_constants(ell)
    factor = math.sqrt(math.pi) * rgamma(0.75 - 0.25j * ell) * rgamma(0.75 + 0.25j * ell)
    return c1 / factor


def c1_coth_form(ell):
    """(pi/i) (2 + coth(pi (ell - i)/4) + coth(-pi (ell + i)/4))."""
    ell = np.asarray(ell, dtype=complex)
    coth = lambda x: np.cosh(x) / np.sinh(x)
    return (np.pi / 1j) * (2.0 + coth(0.25 * np.pi * (ell - 1j)) + coth(-0.25 * np.pi * (ell + 1j)))


def multiplier_g(ell):
    """g(ell) = (i ell/4) sinh(pi ell/2) / (1 - cosh(pi ell/2)); Taylor limit near 0."""
    ell = np.asarray(ell, dtype=float)
    small = np.abs(ell) < G_TAYLOR_CUTOFF
    safe = np.where(small, 1.0, ell)
    x = 0.5 * np.pi * safe
    direct = 0.25j * safe * np.sinh(x) / (1.0 - np.cosh(x))
    e2 = ell * ell
    taylor = -1j / np.pi - 1j * np.pi * e2 / 48.0 + 1j * np.pi ** 3 * e2 * e2 / 11520.0
    out = np.where(small, taylor, direct)
    return complex(out) if out.ndim == 0 else out


def multiplier_g_coth(ell):
    """Equivalent form -(i ell/4) coth(pi ell/4), ell != 0."""
    ell = np.asarray(ell, dtype=float)
    return -0.25j * ell / np.tanh(0.25 * np.pi * ell)


def inversion_multiplier(ell):
    """Exact spectral multiplier C2/C1 making (L R f)^vee(y_o) = f(y_o)."""
    c1, c2 = dual_constants(ell)
    return c2 / c1


def kappa(ell):
    """Measured ratio C2 / (g C1)."""
    c1, c2 = dual_constants(ell)
    return c2 / (multiplier_g(ell) * c1)


def kappa_closed_form(ell):
    """-tanh(pi ell/2) tanh(pi ell/4) / (1 + i sech(pi ell/2))."""
    ell = np.asarray(ell, dtype=float)
    return -np.tanh(0.5 * np.pi * ell) * np.tanh(0.25 * np.pi * ell) / (1.0 + 1j / np.cosh(0.5 * np.pi * ell))


def spectral_integral(fn, radius, spec=DEFAULT_SPECTRAL_QUAD):
    """Integrate a vectorized function of ell over [0, radius]."""
    return integrate(fn, spec.on((0.0, radius)))


def weyl_exponential_sum(ell, Z):
    """sum over W of e^{lambda(w Z)} = 2 cos(ell Z / 2) for the tube coordinate Z."""
    return 2.0 * np.cos(0.5 * np.asarray(ell) * Z)


def d_operator(profile: Callable, Z, model=SL2_MODEL, spec=DEFAULT_SPECTRAL_QUAD, radius=None):
    """Spectral operator D: h -> int_0^inf h(ell) sum_w e^{lambda(w Z)} p(ell) d ell.

    ``Z`` is the complex tube coordinate (multiple of the A-generator) with
    |Im Z| < pi; ``profile`` is any vectorized callable of ell.
    """
    Z = complex(Z)
    if abs(Z.imag) >= math.pi:
        raise ConfigInvalid("D is defined on the tube |Im Z| < pi")
    radius = radius or getattr(profile, 'support_radius', lambda: 40.0)()
    value, err = spectral_integral(
        lambda ell: profile(ell) * weyl_exponential_sum(ell, Z) * plancherel_density(ell),
        radius, spec)
    return value, err
