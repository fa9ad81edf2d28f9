#!/usr/bin/env python3
"""
Rank-one model geometry for the hyperboloids SO_e(1,n)/SO_e(1,n-1).

Points of the complex quadric X_C = {box(z) = 1}, the imaginary hyperboloid
Y = {iy : box(y) = -1}, horosphere parameters (null vectors), the closed-form
Iwasawa projection, the Minkowski pairing and the Cauchy kernel 1/(1 - xi.y).
Coordinates are indexed 0..n; the A-direction mixes coordinates 0 and n.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import special_ortho_group

from horokit.errors import (
    BranchCutHit,
    ConfigInvalid,
    NearSingularKernel,
    NonOrthogonalBlock,
    OutsideDenseSet,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

ALGEBRAIC_TOL = 1e-12
INCIDENCE_TOL = 1e-9
KERNEL_FLOOR = 1e-8
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class RankOneModel:
    """Lorentz signature (1, n) quadric model; n = 2 is the SL(2,R)/SO(1,1) case."""
    n: int = 2

    def __post_init__(self):
        if self.n < 2:
            raise ConfigInvalid(f"model needs n >= 2, got {self.n}")

    @property
    def rho(self):
        return 0.5 * (self.n - 1)

    @property
    def k(self):
        """Half the dimension; defined only for even n."""
        return self.n // 2 if self.n % 2 == 0 else None

    @property
    def J(self):
        return np.diag([1.0] + [-1.0] * self.n)

    @property
    def x_o(self):
        z = np.zeros(self.n + 1, dtype=complex)
        z[0] = 1.0
        return z

    @property
    def xi_o(self):
        z = np.zeros(self.n + 1, dtype=complex)
        z[0] = 1.0
        z[self.n] = 1.0
        return z

    @property
    def y_o(self):
        z = np.zeros(self.n + 1, dtype=complex)
        z[self.n] = 1j
        return z


def minkowski_pair(z, w):
    """z.w = z_0 w_0 - sum_j z_j w_j (bilinear, no conjugation); broadcasts on leading axes."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape[-1] != w.shape[-1]:
        raise ShapeMismatch(f"pairing of lengths {z.shape[-1]} and {w.shape[-1]}")
    out = z[..., 0] * w[..., 0] - np.sum(z[..., 1:] * w[..., 1:], axis=-1)
    return complex(out) if out.ndim == 0 else out


def box(z):
    return minkowski_pair(z, z)


def _scaled_tol(z, tol):
    return tol * max(1.0, float(np.max(np.abs(z))) ** 2)


@dataclass
class GroupElement:
    """Element of SO_e(1,n)_C (or of G when ``real`` is set)."""
    m: np.ndarray
    real: bool = False

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=complex)
        size = self.m.shape[0]
        if self.m.shape != (size, size):
            raise ShapeMismatch(f"group element must be square, got {self.m.shape}")
        J = np.diag([1.0] + [-1.0] * (size - 1))
        scale = max(1.0, float(np.max(np.abs(self.m))) ** 2)
        if np.max(np.abs(self.m.T @ J @ self.m - J)) > ALGEBRAIC_TOL * scale * size:
            raise ShapeMismatch("matrix does not preserve the Lorentz form")
        if self.real and np.max(np.abs(self.m.imag)) > 0:
            raise ShapeMismatch("real group element has complex entries")

    def __matmul__(self, other):
        return GroupElement(self.m @ other.m, real=self.real and other.real)

    def act(self, z):
        """Action on column vectors; ``z`` may carry leading batch axes."""
        return np.asarray(z, dtype=complex) @ self.m.T

    def inverse(self):
        size = self.m.shape[0]
        J = np.diag([1.0] + [-1.0] * (size - 1))
        return GroupElement(J @ self.m.T @ J, real=self.real)


@dataclass
class QuadricPoint:
    z: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=complex)
        if abs(box(self.z) - 1.0) > _scaled_tol(self.z, ALGEBRAIC_TOL):
            raise ShapeMismatch(f"point is off the quadric (box = {box(self.z)})")

    @property
    def invariant(self):
        """u = z.x_o, the K_C-invariant of the point."""
        return complex(self.z[0])


@dataclass
class HoroParam:
    """Horosphere parameter: null vector zeta, optionally with coset data (g, t)."""
    zeta: np.ndarray
    g: Optional[GroupElement] = None
    t: Optional[float] = None

    def __post_init__(self):
        self.zeta = np.asarray(self.zeta, dtype=complex)
        if np.max(np.abs(self.zeta)) == 0:
            raise ShapeMismatch("horosphere parameter must be nonzero")
        if abs(box(self.zeta)) > _scaled_tol(self.zeta, ALGEBRAIC_TOL):
            raise ShapeMismatch(f"horosphere parameter is not null (box = {box(self.zeta)})")
        if self.g is not None:
            if self.t is None or abs(self.t) >= HALF_PI:
                raise ShapeMismatch("coset coordinate t must satisfy |t| < pi/2")
            n = self.zeta.shape[0] - 1
            expected = self.g.act(cmath.exp(1j * self.t) * RankOneModel(n).xi_o)
            if np.max(np.abs(expected - self.zeta)) > 1e-10 * max(1.0, float(np.max(np.abs(expected)))):
                raise ShapeMismatch("zeta does not match its coset coordinates")

    @property
    def has_coset(self):
        return self.g is not None


@dataclass
class IwasawaFactors:
    v: np.ndarray
    w: complex


def make_generator(kind, parameter, model=RankOneModel()):
    """Build a_z, n_v or k_R as a GroupElement.

    Args:
        kind: 'a_z', 'n_v' or 'k_R'.
        parameter: complex scalar z, complex (n-1)-vector v, or orthogonal n x n block R.
        model: the RankOneModel fixing n.

    Raises:
        ShapeMismatch: parameter shape does not fit ``kind``.
        NonOrthogonalBlock: R is not in SO(n).
    """
    n = model.n
    if kind == 'a_z':
        if np.ndim(parameter) != 0:
            raise ShapeMismatch("a_z takes a scalar parameter")
        z = complex(parameter)
        m = np.eye(n + 1, dtype=complex)
        m[0, 0] = m[n, n] = cmath.cosh(z)
        m[0, n] = m[n, 0] = cmath.sinh(z)
        return GroupElement(m, real=z.imag == 0)
    if kind == 'n_v':
        v = np.atleast_1d(np.asarray(parameter, dtype=complex))
        if v.shape != (n - 1,):
            raise ShapeMismatch(f"n_v takes an ({n - 1},) vector, got {v.shape}")
        q = 0.5 * np.sum(v * v)
        m = np.eye(n + 1, dtype=complex)
        m[0, 0] = 1 + q
        m[0, n] = -q
        m[n, 0] = q
        m[n, n] = 1 - q
        m[0, 1:n] = v
        m[n, 1:n] = v
        m[1:n, 0] = v
        m[1:n, n] = -v
        return GroupElement(m, real=bool(np.all(v.imag == 0)))
    if kind == 'k_R':
        R = np.asarray(parameter)
        if R.shape != (n, n):
            raise ShapeMismatch(f"k_R takes an ({n}, {n}) block, got {R.shape}")
        if np.max(np.abs(R.T @ R - np.eye(n))) > ALGEBRAIC_TOL * n or abs(np.linalg.det(R) - 1) > 1e-10:
            raise NonOrthogonalBlock("k_R block must be special orthogonal")
        m = np.eye(n + 1, dtype=complex)
        m[1:, 1:] = R
        return GroupElement(m, real=bool(np.all(np.imag(R) == 0)))
    raise ShapeMismatch(f"unknown generator kind '{kind}'")


def weyl_element(model=RankOneModel()):
    """epsilon = diag(I_{n-1}, -I_2); conjugates a_z to a_{-z}."""
    diag = np.ones(model.n + 1)
    diag[-2:] = -1.0
    return GroupElement(np.diag(diag).astype(complex), real=True)


def iwasawa_point(z: QuadricPoint):
    """Closed-form z = n_v a_w x_o: e^{-w} = z_0 - z_n, v = e^w (z_1, ..., z_{n-1}).

    Raises:
        BranchCutHit: z_0 - z_n lies on (-inf, 0].
    """
    vec = z.z
    d = complex(vec[0] - vec[-1])
    if abs(d.imag) <= 1e-15 * max(1.0, abs(d)) and d.real <= 0:
        raise BranchCutHit(f"z_0 - z_n = {d} lies on the nonpositive real axis")
    w = -cmath.log(d)
    return IwasawaFactors(v=cmath.exp(w) * vec[1:-1], w=w)


def iwasawa_reconstruct(factors, model=RankOneModel()):
    g = make_generator('n_v', factors.v, model) @ make_generator('a_z', factors.w, model)
    return g.act(model.x_o)


def horosphere_contains(xi: HoroParam, z: QuadricPoint):
    """Rank-one incidence: z lies on the horosphere of xi iff xi.z = 1."""
    return abs(minkowski_pair(xi.zeta, z.z) - 1.0) < INCIDENCE_TOL


def dual_fiber_contains(z: QuadricPoint, xi: HoroParam, model=None):
    """Transposed incidence test: move xi into the frame of z and read f_1.

    With z = h.x_o (h = n_v a_w from the Iwasawa projection), xi is in the
    dual fiber of z iff the 0-th coordinate of h^{-1} xi equals 1.
    """
    model = model or RankOneModel(len(z.z) - 1)
    factors = iwasawa_point(z)
    h = make_generator('n_v', factors.v, model) @ make_generator('a_z', factors.w, model)
    moved = h.inverse().act(xi.zeta)
    return abs(moved[0] - 1.0) < INCIDENCE_TOL


def cauchy_kernel(xi: HoroParam, y: QuadricPoint):
    """K(xi, y) = 1 / (1 - xi.y).

    Raises:
        NearSingularKernel: |1 - xi.y| < 1e-8.
    """
    den = 1.0 - minkowski_pair(xi.zeta, y.z)
    if abs(den) < KERNEL_FLOOR:
        raise NearSingularKernel(f"|1 - xi.y| = {abs(den):.3e}; xi is outside the admissible set")
    return 1.0 / den


def xi_from_coset(g: GroupElement, t: float, model=RankOneModel()):
    """The point g.exp(itZ).xi_o = e^{it} g.xi_o of Xi_+."""
    return HoroParam(zeta=g.act(cmath.exp(1j * t) * model.xi_o), g=g, t=float(t))


def random_group_element(rng, model=RankOneModel(), spread=1.0):
    """Random g = k_R a_s n_v in G with |s|, |v_j| <= spread."""
    R = special_ortho_group.rvs(dim=model.n, random_state=rng)
    s = rng.uniform(-spread, spread)
    v = rng.uniform(-spread, spread, size=model.n - 1)
    return (make_generator('k_R', R, model) @ make_generator('a_z', s, model)
            @ make_generator('n_v', v, model))


def y_coordinates(model, t, v, weyl=1):
    """Vectorized a_t n_v w.y_o for real arrays t (shape S) and v (shape S + (n-1,))."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    q = 0.5 * np.sum(v * v, axis=-1)
    out = np.empty(t.shape + (model.n + 1,), dtype=complex)
    out[..., 0] = 1j * weyl * (np.sinh(t) - q * np.exp(t))
    out[..., 1:-1] = -1j * weyl * v
    out[..., -1] = 1j * weyl * (np.cosh(t) - q * np.exp(t))
    return out


def sample_Y(model, count, seed, t_range=(-2.0, 2.0), v_range=(-2.0, 2.0), include_weyl=True):
    """Deterministic samples a_t n_v w.y_o of Y (w in {1, epsilon})."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(*t_range, size=count)
    v = rng.uniform(*v_range, size=(count, model.n - 1))
    weyl = rng.choice([1, -1], size=count) if include_weyl else np.ones(count, dtype=int)
    coords = np.stack([y_coordinates(model, t[i], v[i], weyl[i]) for i in range(count)])
    return [QuadricPoint(c) for c in coords]


def sample_Xi(model, c, count, seed, spread=1.0):
    """Deterministic samples g.exp(itZ).xi_o of Xi_c with |t| <= c."""
    if not 0 < c <= HALF_PI or count < 1:
        raise ConfigInvalid("sample_Xi needs 0 < c <= pi/2 and count >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = random_group_element(rng, model, spread)
        t = rng.uniform(-c, c)
        out.append(xi_from_coset(g, min(t, HALF_PI - 1e-12), model))
    return out


def sample_D(model, count, seed, x_max=0.9 * HALF_PI, spread=1.0):
    """Deterministic samples g.exp(iXZ).x_o of the crown, |X| <= x_max, with their X."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = random_group_element(rng, model, spread)
        X = rng.uniform(-x_max, x_max)
        out.append((QuadricPoint(g.act(make_generator('a_z', 1j * X, model).act(model.x_o))), X))
    return out


@dataclass
class DenseCoordinates:
    """Coordinates h w a.xi_o on the dense subset of Xi_+ (weyl = +1 or -1, a = exp(sZ))."""
    h: Optional[GroupElement] = None
    weyl: int = 1
    s: complex = 0.0


def eval_f_lambda(coords, lam, model=RankOneModel()):
    """Pointwise H-spherical vector f_lambda(h w a.xi_o) = (w^-1 z_H w)^{lambda-rho} a^{lambda-rho}.

    ``lam`` is the coefficient of rho (lambda = lam * rho), so the exponent
    evaluated on Z is (lam - 1) * rho(Z).

    Raises:
        OutsideDenseSet: coordinates missing or outside the dense set.
    """
    if coords is None or coords.weyl not in (1, -1):
        raise OutsideDenseSet("f_lambda needs dense-set coordinates (h, w, a)")
    s = complex(coords.s)
    if abs(s.imag) >= HALF_PI:
        raise OutsideDenseSet(f"a = exp(sZ) with |Im s| = {abs(s.imag):.4f} is outside T(Omega_H)")
    exponent = (complex(lam) - 1.0) * model.rho
    return cmath.exp((coords.weyl * 0.5j * math.pi + s) * exponent)


def y_coset(y: QuadricPoint, model=RankOneModel()):
    """g = a_t n_v w with g.y_o = y for y on the dense part of Y.

    Raises:
        BranchCutHit: y_n = y_0 (y outside the union of the two A N w cells).
    """
    vec = y.z
    gap = complex(vec[-1] - vec[0]).imag
    if abs(gap) < 1e-300:
        raise BranchCutHit("point of Y outside the open A N w cells")
    weyl = 1 if gap > 0 else -1
    t = -math.log(abs(gap))
    v = (1j * vec[1:-1] / weyl).real
    g = make_generator('a_z', t, model) @ make_generator('n_v', v, model)
    if weyl == -1:
        g = g @ weyl_element(model)
    return g


def coset_from_zeta(zeta, model=RankOneModel()):
    """Real horosphere parameter zeta = k_R a_s xi_o; returns k_R a_s."""
    zeta = np.asarray(zeta, dtype=complex)
    if np.max(np.abs(zeta.imag)) > 0 or zeta[0].real <= 0:
        raise ShapeMismatch("coset_from_zeta needs a real null vector with zeta_0 > 0")
    z0 = zeta[0].real
    e = zeta[1:].real / z0
    n = model.n
    R = np.eye(n)
    last = np.zeros(n)
    last[-1] = 1.0
    w = last - e
    if np.linalg.norm(w) > 1e-14:
        H = np.eye(n) - 2.0 * np.outer(w, w) / np.dot(w, w)
        flip = np.eye(n)
        flip[0, 0] = -1.0
        R = H @ flip
    return make_generator('k_R', R, model) @ make_generator('a_z', math.log(z0), model)


def h_element(t, model=RankOneModel()):
    """Element of H = Stab(y_o): boost of rapidity 2t in coordinates (0, 1)."""
    m = np.eye(model.n + 1, dtype=complex)
    m[0, 0] = m[1, 1] = math.cosh(2.0 * t)
    m[0, 1] = m[1, 0] = math.sinh(2.0 * t)
    return GroupElement(m, real=True)


def n_orbit_points(model, z, v):
    """Vectorized n_v a_z x_o for complex z and real v arrays (n = 2: v scalar per point)."""
    v = np.asarray(v, dtype=float)
    z = complex(z)
    q = 0.5 * v * v
    ez = cmath.exp(-z)
    out = np.zeros(v.shape + (model.n + 1,), dtype=complex)
    out[..., 0] = cmath.cosh(z) + q * ez
    out[..., 1] = v * ez
    out[..., -1] = cmath.sinh(z) + q * ez
    return out


def point_invariant(z, model=RankOneModel()):
    """u = z.x_o for a point or a batch of points; constant on K_C-orbits."""
    return minkowski_pair(z, model.x_o)
