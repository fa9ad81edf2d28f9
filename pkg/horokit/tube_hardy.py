#!/usr/bin/env python3
"""
Hardy spaces on tube domains T(Omega) = V + i Omega over Weyl-orbit polytopes.

Omega is the interior of the convex hull of W.y_o for a finite reflection
group W acting on V = R^d. Spectral measures use (2 pi)^{-d/2} d lam, so

    f(w)     = (2 pi)^{-d/2} int F(lam) e^{i <w, lam>} d lam,
    ||f||^2  = (2 pi)^{-d/2} int |F(lam)|^2 COSH(lam) d lam,
    K(z, w)  = (2 pi)^{-d/2} int COS^m_z(lam) COS^m_{-conj w}(lam) / COSH(lam) d lam.

Shipped models: d = 1 with W = {+1, -1}, and an experimental d = 2 sign-flip
model (W is reducible there, so the kernel factors into d = 1 kernels).
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial import ConvexHull

from horokit.errors import ConfigInvalid, NonConvergence
from horokit.numerics import QuadratureSpec, cgamma, gauss_legendre, integrate, rgamma

logger = logging.getLogger(__name__)

GROUP_TOL = 1e-12
TUBE_DECAY_EXPONENT = 37.0
TUBE_MAX_RADIUS = 200.0
GRID_PANEL_WIDTH = 0.5
GRID_PANEL_NODES = 16

TUBE_QUAD = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15, max_subdivisions=20000)
SUP_QUAD = QuadratureSpec(domain=((-math.inf, math.inf),), rel_tol=1e-10, abs_tol=1e-14,
                          tail_cutoff=40.0, decay_rate=1.0, max_subdivisions=4000)


@dataclass
class ReflectionModel:
    """Finite orthogonal group W on V = R^d with base point y_o."""
    d: int
    W: tuple
    y_o: tuple
    name: str = ''
    experimental: bool = False
    _hull: Optional[object] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.W = tuple(np.asarray(s, dtype=float).reshape(self.d, self.d) for s in self.W)
        y = np.asarray(self.y_o, dtype=float)
        if y.shape != (self.d,) or not np.any(y):
            raise ConfigInvalid("y_o must be a nonzero vector of length d")
        self.y_o = y
        for s in self.W:
            if np.max(np.abs(s.T @ s - np.eye(self.d))) > GROUP_TOL:
                raise ConfigInvalid("reflection group elements must be orthogonal")
        for s, w in itertools.product(self.W, repeat=2):
            self.index(s @ w)
        for s in self.W:
            self.index(s.T)
        if self.d > 1:
            self._hull = ConvexHull(self.extreme_points)

    @property
    def order(self):
        return len(self.W)

    @property
    def extreme_points(self):
        return np.array([s @ self.y_o for s in self.W])

    def index(self, matrix):
        """Position of ``matrix`` in the group table; ConfigInvalid if W is not closed."""
        for k, s in enumerate(self.W):
            if np.max(np.abs(s - matrix)) < GROUP_TOL:
                return k
        raise ConfigInvalid("W is not closed under products and inverses")

    def contains(self, y):
        """Membership of y in Omega = int conv(W.y_o)."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if self.d == 1:
            bound = float(np.max(np.abs(self.extreme_points)))
            return bool(abs(y[0]) < bound)
        eq = self._hull.equations
        return bool(np.all(eq[:, :-1] @ y + eq[:, -1] < -1e-14))


def strip_model():
    """d = 1, W = {+1, -1}, y_o = 1: the strip |Im w| < 1."""
    return ReflectionModel(1, ((1.0,), (-1.0,)), (1.0,), name='strip')


def sign_flip_model():
    """d = 2, W = diagonal sign flips, y_o = (1, 1). Experimental: W is reducible."""
    W = tuple(np.diag(signs) for signs in itertools.product((1.0, -1.0), repeat=2))
    return ReflectionModel(2, W, (1.0, 1.0), name='sign-flip', experimental=True)


@dataclass
class Multiplier:
    """Unimodular cocycle m(s, lam) on W x V*; ``fn(k, lam)`` takes the group index k."""
    model: ReflectionModel
    fn: Callable
    name: str = ''

    def __call__(self, k, lam):
        return np.asarray(self.fn(k, np.asarray(lam, dtype=float)), dtype=complex)

    def cocycle_defect(self, lams):
        """max |m(sw, lam) - m(s, w lam) m(w, lam)| over the group table and sampled lam (shape (N, d))."""
        lams = np.asarray(lams, dtype=float).reshape(-1, self.model.d)
        worst = 0.0
        for i, s in enumerate(self.model.W):
            for j, w in enumerate(self.model.W):
                k = self.model.index(s @ w)
                lhs = self(k, lams)
                rhs = self(i, lams @ w.T) * self(j, lams)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def modulus_defect(self, lams):
        lams = np.asarray(lams, dtype=float).reshape(-1, self.model.d)
        return max(float(np.max(np.abs(np.abs(self(k, lams)) - 1.0))) for k in range(self.model.order))


def trivial_multiplier(model):
    return Multiplier(model, lambda k, lam: np.ones(lam.shape[:-1], dtype=complex), name='trivial')


def _reflection_ratio(ell):
    """c(i ell) / c(-i ell) = -Gamma(1 + i ell/2) Gamma((1 - i ell)/2) / (Gamma(1 - i ell/2) Gamma((1 + i ell)/2))."""
    x = 0.5j * np.asarray(ell, dtype=float)
    return -cgamma(1.0 + x) * cgamma(0.5 - x) * rgamma(1.0 - x) * rgamma(0.5 + x)


def lambda_multiplier(model=None):
    """m(s, lam) = c(-s lam') / c(-lam') on the strip, lam' = i ell, ell = 4 lam / pi."""
    model = model or strip_model()
    if model.d != 1:
        raise ConfigInvalid("the Lambda multiplier lives on the one-dimensional strip")
    flip = model.index(-np.eye(1))

    def fn(k, lam):
        ell = (4.0 / math.pi) * lam[..., 0]
        if k == flip:
            return _reflection_ratio(ell)
        return np.ones(ell.shape, dtype=complex)

    return Multiplier(model, fn, name='lambda')


@dataclass
class TubeFunction:
    """Holomorphic function on T(Omega) given by its spectral profile F(lam), lam of shape (..., d)."""
    profile: Callable
    dim: int = 1
    radius: float = 12.0
    multiplier: Optional[Multiplier] = None
    name: str = ''

    def __call__(self, lam):
        return np.asarray(self.profile(np.asarray(lam, dtype=float)), dtype=complex)

    def domain(self):
        return tuple((-self.radius, self.radius) for _ in range(self.dim))


def gaussian_tube(sigma=1.0, dim=1, center=None, phase=None):
    """exp(-|lam - center|^2 / (2 sigma^2)) e^{i <phase, lam>}."""
    center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    phase = np.zeros(dim) if phase is None else np.asarray(phase, dtype=float)

    def profile(lam):
        return np.exp(-np.sum((lam - center) ** 2, axis=-1) / (2.0 * sigma ** 2) + 1j * (lam @ phase))

    radius = float(np.max(np.abs(center))) + 12.0 * sigma
    return TubeFunction(profile, dim, radius, name=f"gaussian(sigma={sigma})")


def _stacked(fn):
    return lambda *coords: fn(np.stack(np.broadcast_arrays(*coords), axis=-1))


def _as_points(lam, d):
    """lam as an array of shape (..., d); bare arrays are read as d = 1 points."""
    lam = np.asarray(lam, dtype=float)
    if d == 1 and (lam.ndim == 0 or lam.shape[-1] != 1):
        lam = lam[..., None]
    return lam


def _measure(d):
    return (2.0 * math.pi) ** (-0.5 * d)


def tube_cosh(y, lam, model):
    """COSH_y(lam) = |W|^-1 sum_s e^{-2 <y, s lam>}; vectorized over lam (..., d)."""
    y = np.asarray(y, dtype=float).reshape(model.d)
    lam = _as_points(lam, model.d)
    total = sum(np.exp(-2.0 * (lam @ s.T) @ y) for s in model.W)
    out = total / model.order
    return float(out) if np.ndim(out) == 0 else out


def tube_hardy_norm(F: TubeFunction, model, spec=TUBE_QUAD):
    """||F||^2 = (2 pi)^{-d/2} int |F|^2 COSH d lam (COSH = COSH_{y_o})."""
    value, err = integrate(_stacked(lambda lam: np.abs(F(lam)) ** 2 * tube_cosh(model.y_o, lam, model)),
                           spec.on(*F.domain()))
    return _measure(F.dim) * value.real, _measure(F.dim) * err


def tube_norm_sup(F: TubeFunction, model, epsilons=(0.2, 0.1, 0.05, 0.02)):
    """sup over y = (1 - eps) s.y_o of the L^2 norm of the slice x -> f(x + iy).

    d = 1 integrates |f(x + iy)|^2 over x directly; d > 1 uses the Plancherel
    form (2 pi)^{-d/2} int |F|^2 e^{-2 <y, lam>} d lam. Returns {y: value}.
    """
    values = {}
    for eps in epsilons:
        for point in model.extreme_points:
            y = (1.0 - eps) * point
            if F.dim == 1:
                value = _slice_norm(F, model, float(y[0]))
            else:
                value, _ = integrate(
                    _stacked(lambda lam: np.abs(F(lam)) ** 2 * np.exp(-2.0 * (lam @ y))),
                    TUBE_QUAD.on(*F.domain()))
                value = _measure(F.dim) * value.real
            values[tuple(float(c) for c in y)] = value
    return values


def _slice_norm(F: TubeFunction, model, y):
    def integrand(x):
        vals = tube_eval_grid(F, np.asarray(x, dtype=float) + 1j * y, model)
        return np.abs(vals) ** 2

    value, _ = integrate(integrand, SUP_QUAD)
    return _measure(1) * value.real


def _grid(F: TubeFunction):
    panels = max(1, int(math.ceil(2.0 * F.radius / GRID_PANEL_WIDTH)))
    edges = np.linspace(-F.radius, F.radius, panels + 1)
    nodes, weights = zip(*(gauss_legendre(GRID_PANEL_NODES, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])))
    return np.concatenate(nodes), np.concatenate(weights)


def _check_tube(w, model):
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if not model.contains(w.imag):
        raise ConfigInvalid(f"point {w} is outside the tube T(Omega)")
    return w


def tube_eval(F: TubeFunction, w, model, spec=TUBE_QUAD):
    """f(w) = (2 pi)^{-d/2} int F(lam) e^{i <w, lam>} d lam for w in T(Omega)."""
    w = _check_tube(w, model)
    value, err = integrate(_stacked(lambda lam: F(lam) * np.exp(1j * (lam @ w))), spec.on(*F.domain()))
    return _measure(F.dim) * value, _measure(F.dim) * err


def tube_eval_grid(F: TubeFunction, w, model):
    """Fixed-grid tube_eval for d = 1 at an array of points w."""
    if F.dim != 1:
        raise ConfigInvalid("grid evaluation is implemented for d = 1")
    w = np.asarray(w, dtype=complex)
    lam, weights = _grid(F)
    vals = (weights * F(lam[:, None])) @ np.exp(1j * np.outer(lam, w.ravel()))
    return (_measure(1) * vals).reshape(w.shape)


def cos_m(w, lam, m: Multiplier):
    """COS^m_w(lam) = |W|^-1 sum_s m(s, lam)^-1 e^{i <w, s lam>}."""
    w = np.asarray(w, dtype=complex).reshape(m.model.d)
    lam = np.asarray(lam, dtype=float)
    total = 0.0
    for k, s in enumerate(m.model.W):
        total = total + np.exp(1j * ((lam @ s.T) @ w)) / m(k, lam)
    return total / m.model.order


def _kernel_radius(z, w, model):
    """Truncation radius from the decay of COS_z COS_w / COSH along the worst direction."""
    spread = float(np.max(np.abs(np.concatenate([np.atleast_1d(z).imag, np.atleast_1d(w).imag]))))
    rate = 2.0 * float(np.min(np.abs(model.y_o))) - 2.0 * spread
    if rate <= 0:
        raise NonConvergence("tube kernel integrand does not decay for these points")
    return min(TUBE_DECAY_EXPONENT / rate, TUBE_MAX_RADIUS)


def tube_kernel(z, w, m: Multiplier, model, spec=TUBE_QUAD):
    """Cauchy-Szego kernel of H^2(T(Omega)) twisted by m."""
    z = _check_tube(z, model)
    w = _check_tube(w, model)
    radius = _kernel_radius(z, w, model)
    value, err = integrate(
        _stacked(lambda lam: cos_m(z, lam, m) * cos_m(-np.conj(w), lam, m) / tube_cosh(model.y_o, lam, model)),
        spec.on(*[(-radius, radius)] * model.d))
    return _measure(model.d) * value, _measure(model.d) * err


def tube_kernel_closed_form(z, w):
    """d = 1, trivial m: sqrt(pi/2) cosh(pi z/4) cosh(pi conj(w)/4) / (cosh(pi z/2) + cosh(pi conj(w)/2))."""
    z = complex(z)
    wb = complex(w).conjugate()
    return (math.sqrt(0.5 * math.pi) * np.cosh(0.25 * math.pi * z) * np.cosh(0.25 * math.pi * wb)
            / (np.cosh(0.5 * math.pi * z) + np.cosh(0.5 * math.pi * wb)))


def tube_kernel_spectral(w, m: Multiplier, model):
    """F(K_w)(lam) = COS^m_{-conj w}(lam) / COSH(lam)."""
    w = np.asarray(w, dtype=complex)
    return lambda lam: cos_m(-np.conj(w), lam, m) / tube_cosh(model.y_o, lam, model)


def tube_inner(F: TubeFunction, G: Callable, model, radius=None, spec=TUBE_QUAD):
    """<F, G> = (2 pi)^{-d/2} int F conj(G) COSH d lam."""
    radius = radius or F.radius
    value, err = integrate(
        _stacked(lambda lam: F(lam) * np.conj(G(lam)) * tube_cosh(model.y_o, lam, model)),
        spec.on(*[(-radius, radius)] * F.dim))
    return _measure(F.dim) * value, _measure(F.dim) * err


def project_tau_invariant(F: TubeFunction, m: Multiplier):
    """Weyl average of tau(s) F(lam) = m(s^-1, lam) F(s^-1 lam)."""
    model = m.model
    inverses = [model.index(s.T) for s in model.W]

    def profile(lam):
        lam = np.asarray(lam, dtype=float)
        total = 0.0
        for k in inverses:
            s_inv = model.W[k]
            total = total + m(k, lam) * F(lam @ s_inv.T)
        return total / model.order

    return TubeFunction(profile, F.dim, F.radius, m, name=f"tau-avg({F.name})")


def tau_defect(F: TubeFunction, m: Multiplier, lams):
    """max over s and sampled lam of |tau(s) F - F|."""
    model = m.model
    lams = np.asarray(lams, dtype=float).reshape(-1, model.d)
    base = F(lams)
    worst = 0.0
    for s in model.W:
        k = model.index(s.T)
        moved = m(k, lams) * F(lams @ model.W[k].T)
        worst = max(worst, float(np.max(np.abs(moved - base))))
    return worst
