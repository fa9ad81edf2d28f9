#!/usr/bin/env python3
"""
Horospherical transforms of K-invariant wave packets on the n = 2 model.

A wave packet f = int_0^inf h(ell) phi_ell p(ell) d ell is carried by its even
spectral profile h. Every transform has two routes: a direct N- or
H-quadrature through the geometry, and a spectral closed form. The ratio of
the two routes is a fixed normalization constant recorded in golden.json.

Measures: dv on N = R, dt on A, dt on H parametrised by h_element(t), and
dt dv on Y through y = a_t n_v w y_o.
"""

import cmath
import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import make_interp_spline

from horokit.errors import (
    ConfigInvalid,
    NearSingularKernel,
    ShapeMismatch,
)
from horokit.geometry import (
    HALF_PI,
    KERNEL_FLOOR,
    GroupElement,
    HoroParam,
    QuadricPoint,
    coset_from_zeta,
    make_generator,
    minkowski_pair,
    n_orbit_points,
    y_coordinates,
    y_coset,
)
from horokit.numerics import QuadratureSpec, gauss_legendre, integrate, line
from horokit.spectra import (
    DEFAULT_SPECTRAL_QUAD,
    SL2_MODEL,
    SpectralProfile,
    dual_constants,
    inversion_multiplier,
    kappa,
    multiplier_g,
    plancherel_density,
    spherical_fn,
)

logger = logging.getLogger(__name__)

# Normalizations of the direct routes relative to the spectral displays.
RADON_NORMALIZATION = 2.0 * math.pi
CAUCHY_CONSTANT = 2.0 * math.pi
DUAL_NORMALIZATION = 0.5 * math.pi
ABEL_FOURIER_NORMALIZATION = 4.0 * math.pi ** 2

ELL_PANEL_WIDTH = 0.75
ELL_PANEL_NODES = 16
EVAL_CHUNK = 512
TABLE_STEP = 0.02
TABLE_HALF_WIDTH = 90.0
N_CUTOFF = 30.0
H_CUTOFF = 40.0
Y_CUTOFF = 30.0
SPIKE_GRADING = 34

N_QUAD = line(-math.inf, math.inf, rel_tol=1e-11, abs_tol=1e-14, tail_cutoff=N_CUTOFF,
              decay_rate=1.0, max_subdivisions=4000)
H_QUAD = line(-math.inf, math.inf, rel_tol=1e-10, abs_tol=1e-14, tail_cutoff=H_CUTOFF,
              decay_rate=1.0, max_subdivisions=4000)
CAUCHY_OUTER = line(-math.inf, math.inf, rel_tol=1e-6, abs_tol=1e-10, tail_cutoff=Y_CUTOFF,
                    decay_rate=0.9, max_subdivisions=2000)
CAUCHY_INNER = line(-math.inf, math.inf, rel_tol=1e-8, abs_tol=1e-12, tail_cutoff=Y_CUTOFF,
                    decay_rate=1.0, max_subdivisions=4000, initial_panels=4)
ABEL_OUTER = line(-math.inf, math.inf, rel_tol=1e-10, abs_tol=1e-13, tail_cutoff=60.0,
                  decay_rate=0.5, max_subdivisions=2000)
ABEL_INNER = line(-math.inf, math.inf, rel_tol=1e-12, abs_tol=1e-15, tail_cutoff=60.0,
                  decay_rate=1.0, max_subdivisions=4000)


@dataclass
class TransformResult:
    value: complex
    error_estimate: float
    route: str


@dataclass
class PacketTable:
    """Quintic spline of a packet along one real line of invariants.

    kind 'boundary': u = i sinh(x) (the boundary Y, limits from the crown).
    kind 'real':     u = cosh(x)   (the real form X).
    Outside [-half_width, half_width] the packet is below double precision and
    reads as zero.
    """
    kind: str
    x: np.ndarray
    real_part: object
    imag_part: object
    half_width: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) <= self.half_width
        xs = np.where(inside, x, 0.0)
        vals = self.real_part(xs) + 1j * self.imag_part(xs)
        return np.where(inside, vals, 0.0)

    def at_invariant(self, u):
        u = np.asarray(u, dtype=complex)
        if self.kind == 'boundary':
            return self(np.arcsinh(u.imag))
        return self(np.arccosh(np.maximum(u.real, 1.0)))


@dataclass
class WavePacket:
    """K-invariant holomorphic function on the crown given by an even profile."""
    profile: SpectralProfile
    model: object = SL2_MODEL
    quadrature: QuadratureSpec = DEFAULT_SPECTRAL_QUAD
    name: str = ''
    panel_width: float = ELL_PANEL_WIDTH
    panel_nodes: int = ELL_PANEL_NODES
    _grid: Optional[tuple] = field(default=None, init=False, repr=False)
    _tables: dict = field(default_factory=dict, init=False, repr=False)
    _lock: object = field(default_factory=threading.RLock, init=False, repr=False)

    def __post_init__(self):
        if self.model.n != 2:
            raise ConfigInvalid("wave packets are implemented for the n = 2 model")
        if not self.profile.is_even(np.linspace(0.0, self.radius, 17)):
            raise ConfigInvalid("wave packet profile must be even in ell")
        if not self.name:
            self.name = self.profile.family

    @property
    def radius(self):
        return self.profile.support_radius()

    def ell_grid(self):
        """Composite Gauss-Legendre nodes on [0, radius] with weights h(ell) p(ell) d ell."""
        with self._lock:
            if self._grid is None:
                self._grid = self._build_grid()
        return self._grid

    def _build_grid(self):
        panels = max(1, int(math.ceil(self.radius / self.panel_width)))
        edges = np.linspace(0.0, self.radius, panels + 1)
        nodes, weights = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            x, w = gauss_legendre(self.panel_nodes, lo, hi)
            nodes.append(x)
            weights.append(w)
        ell = np.concatenate(nodes)
        w = np.concatenate(weights)
        return ell, w, self.profile(ell) * plancherel_density(ell) * w

    def values_at(self, u, side='D'):
        """Packet values at an array of invariants u (any shape)."""
        u = np.asarray(u, dtype=complex)
        flat = u.ravel()
        ell, _, weights = self.ell_grid()
        out = np.empty(flat.shape, dtype=complex)
        for start in range(0, flat.size, EVAL_CHUNK):
            chunk = flat[start:start + EVAL_CHUNK]
            phi = spherical_fn(ell, chunk, self.model, side=side)
            out[start:start + EVAL_CHUNK] = weights @ np.atleast_2d(phi).reshape(ell.size, -1)
        return out.reshape(u.shape)

    def spectral(self, fn, radius=None, spec=None):
        """Adaptive int_0^radius h(ell) fn(ell) d ell."""
        spec = spec or self.quadrature
        return integrate(lambda ell: self.profile(ell) * fn(ell), spec.on((0.0, radius or self.radius)))

    def grid_spectral(self, fn):
        """Fixed-grid int_0^radius h(ell) fn(ell) d ell; fn maps (L,) to (L, ...)."""
        ell, w, _ = self.ell_grid()
        vals = np.asarray(fn(ell), dtype=complex)
        return np.tensordot(w * self.profile(ell), vals, axes=(0, 0))

    def table(self, kind):
        with self._lock:
            if kind not in self._tables:
                x = np.arange(-TABLE_HALF_WIDTH, TABLE_HALF_WIDTH + 0.5 * TABLE_STEP, TABLE_STEP)
                if kind == 'boundary':
                    vals = self.values_at(1j * np.sinh(x), side='D')
                elif kind == 'real':
                    vals = self.values_at(np.cosh(x))
                else:
                    raise ConfigInvalid(f"unknown table kind {kind!r}")
                logger.debug("built %s table for %s (%d nodes)", kind, self.name, x.size)
                self._tables[kind] = PacketTable(
                    kind, x, make_interp_spline(x, vals.real, k=5), make_interp_spline(x, vals.imag, k=5),
                    TABLE_HALF_WIDTH)
        return self._tables[kind]


def eval_packet(f: WavePacket, z: QuadricPoint, side='D'):
    """f(z) = int_0^inf h(ell) phi_ell(z) p(ell) d ell by adaptive quadrature.

    Raises:
        BranchCutHit: z lies on an excluded branch locus of the spherical function.
    """
    u = z.invariant
    value, err = f.spectral(lambda ell: spherical_fn(ell, u, f.model, side=side) * plancherel_density(ell))
    return TransformResult(value, err, 'spectral')


def _xi_coset(xi: HoroParam, model):
    if xi.has_coset:
        return xi.g, xi.t
    zeta = np.asarray(xi.zeta)
    if np.max(np.abs(zeta.imag)) > 0:
        raise ShapeMismatch("complex horosphere parameters must carry coset coordinates (g, t)")
    return coset_from_zeta(zeta, model), 0.0


def _n_integral(f: WavePacket, g: GroupElement, z, spec=N_QUAD, translate=None):
    """int_R f(g n_v a_z x_o) dv with v = sinh(tau)."""
    inverse = translate.inverse() if translate is not None else None

    def integrand(tau):
        pts = g.act(n_orbit_points(f.model, z, np.sinh(tau)))
        if inverse is not None:
            pts = inverse.act(pts)
        return f.values_at(pts[..., 0]) * np.cosh(tau)

    return integrate(integrand, spec)


def radon_real(f: WavePacket, xi: HoroParam, spec=N_QUAD, translate=None):
    """R_R(f)(g.xi_o) = int_N f(g n x_o) dn along a real horosphere.

    With ``translate`` = h the integrand is the translate L_h f, i.e. f(h^-1 .).
    """
    g, t = _xi_coset(xi, f.model)
    if t != 0.0:
        raise ShapeMismatch("radon_real needs a real horosphere (t = 0)")
    value, err = _n_integral(f, g, 0.0, spec, translate)
    return TransformResult(value, err, 'N-quadrature')


def radon_holomorphic(f: WavePacket, xi: HoroParam, spec=N_QUAD, translate=None):
    """R(f)(g a_it xi_o) = e^{-it} int_N f(g n a_it x_o) dn for |t| < pi/2."""
    g, t = _xi_coset(xi, f.model)
    return radon_right_a(f, g, 1j * t, spec, translate)


def radon_right_a(f: WavePacket, g: GroupElement, z, spec=N_QUAD, translate=None):
    """R(f)(g a_z xi_o) = e^{-z} int_N f(g n a_z x_o) dn for |Im z| < pi/2.

    The horosphere of g a_z is integrated from the base g, moving a_z past N.
    """
    z = complex(z)
    if abs(z.imag) >= HALF_PI:
        raise ShapeMismatch("holomorphic Radon transform needs |Im z| < pi/2")
    value, err = _n_integral(f, g, z, spec, translate)
    factor = cmath.exp(-z)
    return TransformResult(factor * value, abs(factor) * err, 'N-quadrature')


def radon_at(f: WavePacket, z, spec=N_QUAD):
    """R(f)(e^z xi_o) for complex z with |Im z| < pi/2."""
    z = complex(z)
    xi = HoroParam(np.exp(z) * f.model.xi_o, make_generator('a_z', z.real, f.model), z.imag)
    return radon_holomorphic(f, xi, spec)


def _radon_exponent(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    return np.log(zeta[..., 0])


def radon_spectral_values(f: WavePacket, z, multiplier: Callable = None):
    """Vectorized spectral Radon display at A-coordinates z (array).

    R(f)(e^z xi_o) = 2 pi e^{-z/2} int_0^inf h(ell) m(ell) cos(z ell / 2) d ell
    """
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()

    def fn(ell):
        m = multiplier(ell) if multiplier is not None else 1.0
        return (m * np.ones_like(ell))[:, None] * np.cos(0.5 * ell[:, None] * flat[None, :])

    vals = RADON_NORMALIZATION * np.exp(-0.5 * flat) * f.grid_spectral(fn)
    return vals.reshape(z.shape)


def radon_spectral(f: WavePacket, xi: HoroParam):
    """Spectral route for the Radon transform at any horosphere parameter."""
    z = complex(_radon_exponent(xi.zeta))
    value, err = f.spectral(lambda ell: np.cos(0.5 * z * ell))
    return TransformResult(RADON_NORMALIZATION * cmath.exp(-0.5 * z) * value,
                           RADON_NORMALIZATION * abs(cmath.exp(-0.5 * z)) * err, 'spectral')


def abel(f: WavePacket, w, spec=N_QUAD):
    """A(f)(a_w) = e^{-w/2} int_N f(n a_w x_o) dn for |Im w| < pi/2."""
    w = complex(w)
    if abs(w.imag) >= HALF_PI:
        raise ShapeMismatch("Abel transform needs |Im w| < pi/2")
    identity = make_generator('a_z', 0.0, f.model)
    value, err = _n_integral(f, identity, w, spec)
    factor = cmath.exp(-0.5 * w)
    return TransformResult(factor * value, abs(factor) * err, 'N-quadrature')


def abel_spectral(f: WavePacket, w):
    """A(f)(a_w) = 2 pi int_0^inf h(ell) cos(w ell / 2) d ell (even in w)."""
    w = complex(w)
    value, err = f.spectral(lambda ell: np.cos(0.5 * w * ell))
    return TransformResult(RADON_NORMALIZATION * value, RADON_NORMALIZATION * err, 'spectral')


def _iterated(slice_value: Callable, outer: QuadratureSpec):
    """Outer adaptive integral of an inner integral evaluated slice by slice."""
    def outer_integrand(x):
        flat = np.asarray(x, dtype=float).ravel()
        vals = np.array([slice_value(float(s)) for s in flat], dtype=complex)
        return vals.reshape(np.shape(x))

    return integrate(outer_integrand, outer)


def abel_fourier(f: WavePacket, ell, outer=ABEL_OUTER, inner=ABEL_INNER):
    """Recover h(ell) from the Abel transform: (4 pi^2)^-1 int A(f)(a_s) e^{i ell s/2} ds.

    A(f)(a_s) is the N-integral with v = sinh(tau), read from the real-form table.
    """
    table = f.table('real')
    ell = float(ell)

    def slice_value(s):
        def integrand(tau):
            u = math.cosh(s) + 0.5 * math.exp(-s) * np.sinh(tau) ** 2
            return table.at_invariant(u) * np.cosh(tau)

        value, _ = integrate(integrand, inner)
        return value * cmath.exp(-0.5 * s + 0.5j * ell * s)

    value, err = _iterated(slice_value, outer)
    return TransformResult(value / ABEL_FOURIER_NORMALIZATION, err / ABEL_FOURIER_NORMALIZATION,
                           'A-quadrature')


def _spike_breakpoints(t, matrix):
    """tau-locations where Im u of (matrix y) crosses zero on the slice y = a_t n_v w y_o.

    Im u = w (C + B v + A v^2) with coefficients from the first row of matrix;
    the roots do not depend on w.
    Each root gets geometrically graded neighbours so narrow features are resolved.
    """
    m00, m01, m02 = matrix[0, 0].real, matrix[0, 1].real, matrix[0, -1].real
    a = -0.5 * (m00 + m02) * math.exp(t)
    b = -m01
    c = m00 * math.sinh(t) + m02 * math.cosh(t)
    roots = np.roots([a, b, c]) if abs(a) > 0 else (np.array([-c / b]) if b else np.array([]))
    roots = np.real(roots[np.abs(np.imag(roots)) < 1e-12])
    taus = np.arcsinh(roots)
    grading = np.exp(-np.arange(SPIKE_GRADING, dtype=float))
    points = [taus]
    for tau in taus:
        points.append(tau + grading)
        points.append(tau - grading)
    return np.concatenate(points)


def cauchy_transform(f: WavePacket, xi: HoroParam, translate: GroupElement = None,
                     outer=CAUCHY_OUTER, inner=CAUCHY_INNER):
    """C(f)(xi) = int_Y f(y) / (1 - xi.y) dy over both Weyl pieces of Y.

    f is read from its boundary table, i.e. as the limit from the crown. With
    ``translate`` = g the integrand uses L_g f = f(g^-1 .).

    Raises:
        NearSingularKernel: |1 - xi.y| drops below the kernel floor on a node.
    """
    table = f.table('boundary')
    zeta = np.asarray(xi.zeta, dtype=complex)
    inverse = translate.inverse() if translate is not None else None
    matrix = inverse.m if inverse is not None else np.eye(f.model.n + 1)
    closest = [math.inf]

    def slice_integral(t):
        def integrand(tau):
            total = 0.0
            for weyl in (1, -1):
                y = y_coordinates(f.model, np.full(np.shape(tau), t), np.sinh(tau)[..., None], weyl)
                den = 1.0 - minkowski_pair(zeta, y)
                low = float(np.min(np.abs(den)))
                closest[0] = min(closest[0], low)
                if low < KERNEL_FLOOR:
                    raise NearSingularKernel(f"|1 - xi.y| = {low:.2e} below floor {KERNEL_FLOOR:g}")
                pts = inverse.act(y) if inverse is not None else y
                total = total + table.at_invariant(pts[..., 0]) / den
            return total * np.cosh(tau)

        value, _ = integrate(integrand, inner, breakpoints=_spike_breakpoints(t, matrix))
        return value

    value, err = _iterated(slice_integral, outer)
    logger.debug("cauchy_transform: min |1 - xi.y| = %.3e", closest[0])
    return TransformResult(value, err, 'Y-quadrature')


def dual_transform(phi: Callable, y: QuadricPoint, model=SL2_MODEL, spec=H_QUAD):
    """phi^vee(y) = int_H phi(g h z_H xi_o) dh, y = g.y_o, z_H xi_o = i xi_o.

    ``phi`` is a vectorized function of null vectors (array (..., n+1)).

    Raises:
        NonConvergence: phi does not decay along the H-orbit (e.g. constant phi).
    """
    g = y_coset(y, model)
    base = 1j * model.xi_o
    gm = g.m

    def integrand(t):
        t = np.asarray(t, dtype=float)
        ch, sh = np.cosh(2.0 * t), np.sinh(2.0 * t)
        pts = np.zeros(t.shape + (model.n + 1,), dtype=complex)
        pts[..., 0] = base[0] * ch + base[1] * sh
        pts[..., 1] = base[0] * sh + base[1] * ch
        pts[..., 2:] = base[2:]
        pts = pts @ gm.T
        return np.asarray(phi(pts), dtype=complex)

    value, err = integrate(integrand, spec)
    return TransformResult(value, err, 'H-quadrature')


def radon_spectral_phi(f: WavePacket, multiplier: Callable = None):
    """The spectral Radon display as a function of null vectors zeta (K-invariance: only zeta_0 matters)."""
    def phi(zeta):
        return radon_spectral_values(f, _radon_exponent(zeta), multiplier)
    return phi


def dual_radon_spectral(f: WavePacket):
    """R(f)^vee(y_o) = (pi/2) int_0^inf h(ell) C1(ell) d ell."""
    value, err = f.spectral(lambda ell: dual_constants(ell)[0])
    return TransformResult(DUAL_NORMALIZATION * value, DUAL_NORMALIZATION * err, 'spectral')


def horo_power(lam):
    """Test function zeta -> zeta_0^{-(1 + i lam)/2} (the A-part of zeta to the power rho(1 + i lam))."""
    def phi(zeta):
        z0 = np.asarray(zeta, dtype=complex)[..., 0]
        return np.exp(-0.5 * (1.0 + 1j * lam) * np.log(z0))
    return phi


def c1_on_orbit(ell, y: QuadricPoint, model=SL2_MODEL, spec=H_QUAD):
    """C1 measured on the H-orbit of y: 2 (p_ell^vee(y) + p_-ell^vee(y)) for the horospherical powers p.

    Returns (values, error_estimates) as arrays over ell.
    """
    ell = np.atleast_1d(np.asarray(ell, dtype=float))
    values = np.empty(ell.shape, dtype=complex)
    errors = np.empty(ell.shape, dtype=float)
    for k, e in enumerate(ell):
        plus = dual_transform(horo_power(e), y, model, spec)
        minus = dual_transform(horo_power(-e), y, model, spec)
        values[k] = 2.0 * (plus.value + minus.value)
        errors[k] = 2.0 * (plus.error_estimate + minus.error_estimate)
    return values, errors


def invert(f: WavePacket, y: QuadricPoint = None, spec=H_QUAD):
    """Reconstruct f(y) from its Radon transform.

    Route 'a' splits the Radon display into horospherical powers, integrates
    each over the H-orbit of y and applies g(ell) times the measured kappa.
    Route 'b' applies the exact multiplier C2/C1 to the spectral Radon display
    and integrates over the H-orbit. Both return estimates of f(y).
    """
    y = y or QuadricPoint(f.model.y_o)
    ell, w, _ = f.ell_grid()
    c1, c1_err = c1_on_orbit(ell, y, f.model, spec)
    weights = w * f.profile(ell) * multiplier_g(ell) * kappa(ell)
    route_a = TransformResult(complex(np.sum(weights * c1)), float(np.sum(np.abs(weights) * c1_err)),
                              'H-quadrature-powers')
    dual = dual_transform(radon_spectral_phi(f, inversion_multiplier), y, f.model, spec)
    route_b = TransformResult(dual.value / DUAL_NORMALIZATION, dual.error_estimate / DUAL_NORMALIZATION,
                              'H-quadrature')
    return route_a, route_b


def boundary_limit(f: WavePacket, y: QuadricPoint, delta):
    """f at the crown point g a_{i(pi/2 - delta)} x_o approaching y = g.y_o."""
    if not 0.0 < delta < HALF_PI:
        raise ConfigInvalid("delta must lie in (0, pi/2)")
    g = y_coset(y, f.model)
    z = g.act(make_generator('a_z', 1j * (HALF_PI - delta), f.model).act(f.model.x_o))
    return eval_packet(f, QuadricPoint(z))
