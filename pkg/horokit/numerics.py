#!/usr/bin/env python3
"""
Numerical core: adaptive Gauss-Kronrod quadrature for complex integrands on
boxes (with exponential-tail truncation for infinite sides), and the complex
special functions Gamma, Beta and Gauss 2F1 used by every other module.

All functions are pure and reentrant; integrands are expected to be
vectorized (they receive numpy arrays and return arrays of the same shape).
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from horokit.errors import (
    ConfigInvalid,
    DivergentAtOne,
    NonConvergence,
    NonFinite,
    PoleAtNonpositiveInteger,
    SeriesNonConvergence,
)

logger = logging.getLogger(__name__)

ComplexValue = complex

# Gauss-Kronrod 15/7 abscissae and weights on [-1, 1] (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

KRONROD_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:3], [_WG[3]], _WG[2::-1]])

# Lanczos approximation, g = 7, nine terms
LANCZOS_G = 7
LANCZOS_X0 = 0.99999999999980993
LANCZOS_P = np.array([
    676.5203681218851, -1259.1392167224028, 771.32342877765313,
    -176.61502916214059, 12.507343278686905, -0.13857109526572012,
    9.9843695780195716e-6, 1.5056327351493116e-7,
])
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

SERIES_MAX_TERMS = 3000
SERIES_EPS = 1e-16
TRANSFORM_SWITCH = 0.5


@dataclass(frozen=True)
class QuadratureSpec:
    """Domain, tolerances and truncation policy for one numerical integral.

    ``domain`` is a sequence of (lower, upper) pairs, one per coordinate;
    infinite ends are truncated at ``tail_cutoff`` and the neglected tail is
    bounded using ``decay_rate`` (the integrand is assumed to decay at least
    like exp(-decay_rate * |x|) beyond the cutoff).
    """
    domain: tuple = ((0.0, 1.0),)
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 4000
    tail_cutoff: float = 40.0
    decay_rate: float = 0.0
    initial_panels: int = 8

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ConfigInvalid("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ConfigInvalid("max_subdivisions must be >= 1")
        if self.tail_cutoff <= 0:
            raise ConfigInvalid("tail_cutoff must be positive")
        if self.initial_panels < 1:
            raise ConfigInvalid("initial_panels must be >= 1")
        for lo, hi in self.domain:
            if not lo < hi:
                raise ConfigInvalid(f"empty interval ({lo}, {hi}) in quadrature domain")

    @property
    def dim(self):
        return len(self.domain)

    def on(self, *domain, **overrides):
        """Copy of this spec over a new domain."""
        return replace(self, domain=tuple(tuple(map(float, d)) for d in domain), **overrides)

    def scaled(self, factor):
        """Copy with both tolerances multiplied by ``factor``."""
        return replace(self, rel_tol=self.rel_tol * factor, abs_tol=self.abs_tol * factor)


def line(lower, upper, **kwargs):
    """One-dimensional QuadratureSpec shortcut."""
    return QuadratureSpec(domain=((float(lower), float(upper)),), **kwargs)


def ensure_finite(value, what="value"):
    """Raise NonFinite unless every component of ``value`` is finite."""
    arr = np.asarray(value)
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{what} is not finite")
    return value


def _node_table(dim):
    idx = np.indices((15,) * dim).reshape(dim, -1).T
    wk = np.prod(KRONROD_WEIGHTS[idx], axis=1)
    wg = np.prod(GAUSS_WEIGHTS[idx], axis=1)
    return idx, wk, wg


def _evaluate_panels(f, lows, highs, table):
    idx, wk, wg = table
    half = 0.5 * (highs - lows)
    mid = 0.5 * (highs + lows)
    coords = [mid[:, k, None] + half[:, k, None] * KRONROD_NODES[idx[:, k]][None, :]
              for k in range(lows.shape[1])]
    vals = np.asarray(f(*coords), dtype=complex)
    vals = np.broadcast_to(vals, coords[0].shape)
    if not np.all(np.isfinite(vals)):
        raise NonFinite("integrand returned NaN/Inf")
    jac = np.prod(half, axis=1)
    kron = (vals @ wk) * jac
    gauss = (vals @ wg) * jac
    return kron, np.abs(kron - gauss)


def _truncate(spec):
    lows, highs, faces = [], [], []
    for k, (lo, hi) in enumerate(spec.domain):
        if math.isinf(lo):
            lo = -spec.tail_cutoff if math.isinf(hi) or hi > -spec.tail_cutoff else hi - spec.tail_cutoff
            faces.append((k, lo))
        if math.isinf(hi):
            hi = spec.tail_cutoff if lo < spec.tail_cutoff else lo + spec.tail_cutoff
            faces.append((k, hi))
        lows.append(lo)
        highs.append(hi)
    return np.array(lows, dtype=float), np.array(highs, dtype=float), faces


def _tail_bound(f, spec, lows, highs, faces):
    """Bound on the integral beyond the truncation faces."""
    bound = 0.0
    for k, value in faces:
        others = [j for j in range(len(lows)) if j != k]
        if others:
            grids = np.meshgrid(*[0.5 * (lows[j] + highs[j]) + 0.5 * (highs[j] - lows[j]) * KRONROD_NODES
                                  for j in others], indexing='ij')
            coords = [None] * len(lows)
            for j, g in zip(others, grids):
                coords[j] = g.ravel()
            coords[k] = np.full(grids[0].size, value)
            extent = float(np.prod([highs[j] - lows[j] for j in others]))
        else:
            coords = [np.array([value])]
            extent = 1.0
        peak = float(np.max(np.abs(np.asarray(f(*coords), dtype=complex))))
        if not math.isfinite(peak):
            raise NonFinite("integrand returned NaN/Inf at truncation face")
        rate = spec.decay_rate if spec.decay_rate > 0 else 1.0 / spec.tail_cutoff
        bound += peak * extent / rate
    return bound


def integrate(f: Callable, spec: QuadratureSpec, breakpoints=None):
    """Adaptive Gauss-Kronrod integration of a complex, vectorized integrand.

    Args:
        f: Callable taking ``spec.dim`` numpy arrays (broadcast together) and
            returning complex values of the same shape.
        spec: QuadratureSpec describing domain, tolerances and truncation.
        breakpoints: Optional interior points (one-dimensional domains only)
            added to the initial panel edges.

    Returns:
        Tuple of (value, error_estimate); the estimate includes the tail bound.

    Raises:
        NonConvergence: subdivision budget exhausted, or the truncated tail
            alone exceeds the tolerance (integrand does not decay).
        NonFinite: the integrand produced NaN/Inf.
    """
    lows0, highs0, faces = _truncate(spec)
    tail = _tail_bound(f, spec, lows0, highs0, faces) if faces else 0.0

    dim = spec.dim
    table = _node_table(dim)
    cuts = [np.linspace(lows0[k], highs0[k], spec.initial_panels + 1) for k in range(dim)]
    if breakpoints is not None:
        if dim != 1:
            raise ConfigInvalid("breakpoints are supported for one-dimensional domains only")
        extra = np.asarray(breakpoints, dtype=float).ravel()
        extra = extra[(extra > lows0[0]) & (extra < highs0[0])]
        cuts[0] = np.unique(np.concatenate([cuts[0], extra]))
    starts = np.meshgrid(*[c[:-1] for c in cuts], indexing='ij')
    ends = np.meshgrid(*[c[1:] for c in cuts], indexing='ij')
    lows = np.stack([s.ravel() for s in starts], axis=1)
    highs = np.stack([e.ravel() for e in ends], axis=1)
    values, errors = _evaluate_panels(f, lows, highs, table)

    splits = 0
    while True:
        total = complex(values.sum())
        err = float(errors.sum()) + tail
        target = max(spec.rel_tol * abs(total), spec.abs_tol)
        if err <= target:
            logger.debug("integrate: %d panels, %d splits, err=%.3e", len(values), splits, err)
            return total, err
        if tail > 0.5 * target:
            raise NonConvergence(
                f"integrand tail beyond cutoff {spec.tail_cutoff} is {tail:.3e} "
                f"(tolerance {target:.3e}); the integral may diverge")
        chosen = errors > (target - tail) / len(errors)
        chosen[np.argmax(errors)] = True
        splits += int(chosen.sum())
        if splits > spec.max_subdivisions:
            raise NonConvergence(
                f"subdivision budget {spec.max_subdivisions} exhausted "
                f"(error {err:.3e} > tolerance {target:.3e})")

        sel_lo, sel_hi = lows[chosen], highs[chosen]
        axis = np.argmax(sel_hi - sel_lo, axis=1)
        rows = np.arange(len(axis))
        middle = 0.5 * (sel_lo[rows, axis] + sel_hi[rows, axis])
        left_hi = sel_hi.copy()
        left_hi[rows, axis] = middle
        right_lo = sel_lo.copy()
        right_lo[rows, axis] = middle
        new_lo = np.concatenate([sel_lo, right_lo])
        new_hi = np.concatenate([left_hi, sel_hi])
        new_vals, new_errs = _evaluate_panels(f, new_lo, new_hi, table)

        keep = ~chosen
        lows = np.concatenate([lows[keep], new_lo])
        highs = np.concatenate([highs[keep], new_hi])
        values = np.concatenate([values[keep], new_vals])
        errors = np.concatenate([errors[keep], new_errs])


def gauss_legendre(n, a, b):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return 0.5 * (b + a) + half * x, half * w


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _check_poles(z, name="Gamma"):
    near = np.round(z.real)
    pole = (z.real < 0.5) & (np.abs(z.imag) < 1e-14) & (np.abs(z.real - near) < 1e-14)
    if np.any(pole):
        raise PoleAtNonpositiveInteger(f"{name} pole at {z[pole].ravel()[0].real:g}")


def _lanczos(z):
    z = z - 1.0
    x = LANCZOS_X0 + sum(p / (z + i + 1) for i, p in enumerate(LANCZOS_P))
    t = z + LANCZOS_G + 0.5
    return np.exp(HALF_LOG_TWO_PI + (z + 0.5) * np.log(t) - t + np.log(x))


def cgamma(z):
    """Complex Gamma function (Lanczos g=7 with reflection for Re z < 1/2).

    Accepts a scalar or an array; returns a complex scalar or complex array.

    Raises:
        PoleAtNonpositiveInteger: z in {0, -1, -2, ...}.
    """
    z, scalar = _as_complex(z)
    _check_poles(z)
    left = z.real < 0.5
    core = _lanczos(np.where(left, 1.0 - z, z))
    with np.errstate(over='ignore', invalid='ignore'):
        out = np.where(left, np.pi / (np.sin(np.pi * z) * core), core)
    ensure_finite(out, "Gamma")
    return complex(out) if scalar else out


def rgamma(z):
    """1/Gamma(z); zero at the poles instead of raising."""
    z, scalar = _as_complex(z)
    near = np.round(z.real)
    pole = (z.real < 0.5) & (np.abs(z.imag) < 1e-14) & (np.abs(z.real - near) < 1e-14)
    safe = np.where(pole, 0.5, z)
    out = np.where(pole, 0.0, 1.0 / cgamma(safe))
    return complex(out) if scalar else out


def cbeta(a, b):
    """Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    a, sa = _as_complex(a)
    b, sb = _as_complex(b)
    _check_poles(a + b, "Beta")
    out = cgamma(a) * cgamma(b) / cgamma(a + b)
    return complex(out) if (sa and sb) else out


def hyp_series(a, b, c, x, max_terms=SERIES_MAX_TERMS):
    """Vectorized power series of 2F1(a, b; c; x), broadcasting all arguments."""
    a, b, c, x = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, x)))
    term = np.ones(x.shape, dtype=complex)
    total = term.copy()
    settled = np.zeros(x.shape, dtype=bool)
    for k in range(max_terms):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        total = total + term
        small = np.abs(term) <= SERIES_EPS * np.maximum(np.abs(total), 1e-300)
        if np.all(small & settled):
            return total
        settled = small
    raise SeriesNonConvergence(
        f"2F1 series did not converge in {max_terms} terms (max |x| = {np.max(np.abs(x)):.4f})")


def _is_integer(v, tol=1e-12):
    return abs(v.imag) < tol and abs(v.real - round(v.real)) < tol


def gauss_2f1(a, b, c, x):
    """Gauss hypergeometric function 2F1(a, b; c; x) for |x| <= 1.

    Direct series for |x| <= 1/2; otherwise the smaller of the Pfaff argument
    x/(x-1) and the 1-x connection (used only when c-a-b is not an integer).
    At x = 1 the Gauss closed form is returned.

    Raises:
        DivergentAtOne: x = 1 and Re(c-a-b) <= 0.
        SeriesNonConvergence: no candidate argument converges.
        PoleAtNonpositiveInteger: c in {0, -1, ...}.
    """
    a, b, c, x = (complex(v) for v in (a, b, c, x))
    _check_poles(np.asarray(c), "2F1 lower parameter")
    s = c - a - b
    if x == 1.0:
        if s.real <= 0:
            raise DivergentAtOne(f"2F1 diverges at x=1 (Re(c-a-b) = {s.real:g})")
        return complex(cgamma(c) * cgamma(s) * rgamma(c - a) * rgamma(c - b))
    if x == 0.0:
        return 1.0 + 0j
    if abs(x) <= TRANSFORM_SWITCH:
        return complex(hyp_series(a, b, c, x))

    pfaff = x / (x - 1.0)
    candidates = [(abs(pfaff), 'pfaff')]
    if not _is_integer(s):
        candidates.append((abs(1.0 - x), 'one_minus'))
    candidates.append((abs(x), 'direct'))
    candidates.sort(key=lambda item: item[0])
    route = candidates[0][1]
    logger.debug("gauss_2f1: route %s at x=%s", route, x)

    if route == 'pfaff':
        return complex((1.0 - x) ** (-a) * hyp_series(a, c - b, c, pfaff))
    if route == 'one_minus':
        return connection_one_minus(a, b, c, x)
    return complex(hyp_series(a, b, c, x))


def connection_one_minus(a, b, c, x):
    """2F1 via the connection formula around x = 1 (c-a-b not an integer)."""
    s = c - a - b
    y = 1.0 - x
    first = cgamma(c) * cgamma(s) * rgamma(c - a) * rgamma(c - b) * hyp_series(a, b, 1.0 - s, y)
    second = (y ** s) * cgamma(c) * cgamma(-s) * rgamma(a) * rgamma(b) * hyp_series(c - a, c - b, 1.0 + s, y)
    return complex(first + second)
