"""Geodesics, spheres and the Carnot-Caratheodory distance.

A geodesic from the origin with curvature ``phi`` and initial heading
``alpha`` reaches, after arclength ``s``, the point

    z(s) = s * sinc(psi/2) * exp(i (alpha - psi/2)),
    t(s) = 2 s^2 (psi - sin psi) / psi^2,           psi = phi * s,

and is minimizing while ``|psi| <= 2 pi``. Inverting this relation for a
given point reduces to the scalar equation

    m(psi) = (psi - sin psi) / (1 - cos psi) = |t| / |z|^2,

with ``m`` strictly increasing from 0 to +inf on ``(0, 2 pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .group import TWO_PI, as_points, inverse, multiply, relative

HALF_PI = 0.5 * math.pi
_SERIES_CUTOFF = 0.5
_NEWTON_MAXITER = 200


# -- elementary functions ---------------------------------------------------

def psi_minus_sin(x):
    """``x - sin x`` without cancellation near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUTOFF
    xs = np.where(small, x, 0.0)
    x2 = xs * xs
    # x^3/3! - x^5/5! + ... , Horner form; 8 terms are exact to 1 ulp at 0.5
    series = xs * x2 / 6.0 * (
        1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72 * (1 - x2 / 110 * (1 - x2 / 156 * (1 - x2 / 210 * (1 - x2 / 272))))))
    )
    return np.where(small, series, x - np.sin(x))


def _half_sinc(psi):
    """``sin(psi/2) / (psi/2)``, equal to 1 at 0."""
    return np.sinc(np.asarray(psi, dtype=float) / TWO_PI)


def _height_factor(psi):
    """``(psi - sin psi) / psi^2``, extended by 0 at psi = 0."""
    psi = np.asarray(psi, dtype=float)
    safe = np.where(psi == 0.0, 1.0, psi)
    return np.where(psi == 0.0, 0.0, psi_minus_sin(safe) / (safe * safe))


def sweep_ratio(psi):
    """The monotone function ``m(psi) = t / |z|^2`` on a sphere, for psi in (0, 2 pi)."""
    psi = np.asarray(psi, dtype=float)
    return psi_minus_sin(psi) / (2.0 * np.sin(0.5 * psi) ** 2)


def sweep_ratio_series(psi):
    """Leading terms ``psi/3 + psi^3/90`` of ``m`` at the origin."""
    psi = np.asarray(psi, dtype=float)
    return psi / 3.0 + psi ** 3 / 90.0


def _ratio_from_complement(u):
    """``m(2 pi - u)``, accurate when ``u`` is small."""
    u = np.asarray(u, dtype=float)
    return (TWO_PI - u + np.sin(u)) / (2.0 * np.sin(0.5 * u) ** 2)


# -- the sweep-angle solver --------------------------------------------------

def _safeguarded_newton(fun, lo, hi, x0, increasing, tol=1e-15):
    """Vectorized Newton iteration kept inside a shrinking bracket.

    ``fun`` returns ``(f, df)``. Steps leaving the bracket fall back to
    bisection, so convergence is guaranteed for monotone ``f``.
    """
    lo, hi = lo.copy(), hi.copy()
    x = np.clip(x0, lo, hi)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(_NEWTON_MAXITER):
        f, df = fun(x)
        above = f > 0
        move_hi = above if increasing else ~above
        hi = np.where(active & move_hi, x, hi)
        lo = np.where(active & ~move_hi, x, lo)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = x - f / df
        inside = np.isfinite(step) & (step > lo) & (step < hi)
        nxt = np.where(f == 0, x, np.where(inside, step, 0.5 * (lo + hi)))
        done = (np.abs(nxt - x) <= tol * np.maximum(np.abs(x), 1e-300)) | (f == 0) | (hi - lo <= tol * hi)
        x = np.where(active, nxt, x)
        active &= ~done
        if not active.any():
            break
    return x


def solve_sweep(mu):
    """Solve ``m(psi) = mu`` for ``psi`` in ``(0, 2 pi)``.

    Returns ``(psi, u)`` with ``u = 2 pi - psi`` carried separately so
    that points close to the vertical axis keep full relative accuracy.
    ``mu`` must be positive and finite.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    psi = np.empty_like(mu)
    u = np.empty_like(mu)
    log_mu = np.log(mu)

    tiny = mu < 1e-30
    psi[tiny] = 3.0 * mu[tiny]
    u[tiny] = TWO_PI - psi[tiny]

    low = (mu <= HALF_PI) & ~tiny
    if low.any():
        lm = log_mu[low]

        def f_low(x):
            m = sweep_ratio(x)
            return np.log(m) - lm, 1.0 / m - 1.0 / np.tan(0.5 * x)

        n = lm.shape
        x = _safeguarded_newton(f_low, np.zeros(n), np.full(n, math.pi), 3.0 * mu[low], True)
        psi[low] = x
        u[low] = TWO_PI - x

    high = mu > HALF_PI
    if high.any():
        lm = log_mu[high]

        def f_high(v):
            m = _ratio_from_complement(v)
            num = TWO_PI - v + np.sin(v)
            return np.log(m) - lm, (np.cos(v) - 1.0) / num - 1.0 / np.tan(0.5 * v)

        n = lm.shape
        seed = np.sqrt(4.0 * math.pi / mu[high])
        v = _safeguarded_newton(f_high, np.zeros(n), np.full(n, math.pi), seed, False)
        u[high] = v
        psi[high] = TWO_PI - v
    return psi, u


# -- polar coordinates and distance -------------------------------------------

@dataclass(frozen=True)
class PolarSolve:
    """Geodesic coordinates of a point seen from the origin."""

    psi: float
    r: float
    lam: float
    heading: float
    phi: float = field(default=0.0)


def polar_arrays(p):
    """Vectorized polar solve. Returns ``(psi, r, lam, heading, phi)`` arrays.

    The origin maps to ``psi = nan, r = 0``.
    """
    p = as_points(p)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    rho = np.hypot(x, y)
    abs_t = np.abs(t)
    shape = rho.shape
    psi = np.full(shape, np.nan)
    r = np.zeros(shape)
    heading = np.zeros(shape)

    flat = (abs_t == 0) & (rho > 0)
    axis = (rho == 0) & (abs_t > 0)
    generic = (rho > 0) & (abs_t > 0)

    psi[flat] = 0.0
    r[flat] = rho[flat]
    heading[flat] = np.arctan2(y[flat], x[flat])

    psi[axis] = TWO_PI
    r[axis] = np.sqrt(math.pi * abs_t[axis])

    if generic.any():
        rg, tg = rho[generic], abs_t[generic]
        mu = tg / (rg * rg)
        # m(psi) saturates the double range for tiny |z|; treat as on-axis
        huge = ~np.isfinite(mu)
        mu = np.where(huge, 1e300, mu)
        ps, us = solve_sweep(mu)
        via_z = rg / _half_sinc(ps)
        with np.errstate(divide="ignore", invalid="ignore"):
            # only used for psi > pi, where the denominator is bounded away from 0
            via_t = ps * np.sqrt(tg / (2.0 * psi_minus_sin(ps)))
        rr = np.where(ps <= math.pi, via_z, via_t)
        rr = np.where(huge, np.sqrt(math.pi * tg), rr)
        psi[generic] = ps
        r[generic] = rr
        sign = np.sign(t[generic])
        heading[generic] = np.arctan2(y[generic], x[generic]) + sign * 0.5 * ps

    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(psi == 0, np.inf, TWO_PI / psi)
        phi = np.where(r > 0, np.sign(t) * psi / r, 0.0)
    heading = np.mod(heading, TWO_PI)
    return psi, r, lam, heading, phi


def solve_polar(p) -> PolarSolve:
    """Sweep angle, distance, lifetime ratio and heading of a single point."""
    p = as_points(p)
    if p.shape != (3,):
        raise ValueError("solve_polar takes a single point; use polar_arrays for batches")
    if not np.any(p):
        raise ValueError("the origin has no polar coordinates")
    psi, r, lam, heading, phi = (float(a) for a in polar_arrays(p))
    return PolarSolve(psi=psi, r=r, lam=lam, heading=heading, phi=phi)


def cc_norm(p):
    """Control distance from the origin, vectorized."""
    out = polar_arrays(p)[1]
    return float(out) if np.ndim(out) == 0 else out


def cc_distance(p, q):
    """Carnot-Caratheodory distance ``d(p, q)``, vectorized over leading axes."""
    return cc_norm(relative(p, q))


# -- geodesic curves -----------------------------------------------------------

@dataclass(frozen=True)
class GeodesicParams:
    """Unit-speed geodesic ``base . gamma_{phi, alpha}(s)``.

    ``phi = 0`` is a horizontal straight line. The lifetime over which the
    curve is minimizing is ``2 pi / |phi|``.
    """

    phi: float
    alpha: float
    base: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def lifetime(self) -> float:
        return math.inf if self.phi == 0 else TWO_PI / abs(self.phi)

    @classmethod
    def from_radius_family(cls, q: float, alpha: float) -> "GeodesicParams":
        """Lifetime ``2 pi q`` geodesic from ``(0, 0, -2 pi q^2)`` through ``(2q e^{i alpha}; 0)``.

        Here ``alpha`` is the direction of the midpoint, reached at ``s = pi q``;
        the initial heading is ``alpha + pi/2``.
        """
        if not q > 0:
            raise ValueError(f"q must be positive, got {q}")
        return cls(phi=1.0 / q, alpha=alpha + HALF_PI, base=(0.0, 0.0, -TWO_PI * q * q))


def geodesic_from_origin(phi, alpha, s):
    """Broadcasting evaluation of the origin-based geodesic."""
    phi, alpha, s = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (phi, alpha, s)))
    psi = phi * s
    rad = s * _half_sinc(psi)
    ang = alpha - 0.5 * psi
    t = 2.0 * s * s * _height_factor(psi)
    return np.stack([rad * np.cos(ang), rad * np.sin(ang), t], axis=-1)


def geodesic_point(g: GeodesicParams, s):
    """Point at arclength ``s`` (scalar or array) along ``g``."""
    local = geodesic_from_origin(g.phi, g.alpha, s)
    return multiply(np.asarray(g.base, dtype=float), local)


@dataclass(frozen=True)
class SpherePoint:
    r: float
    phi: float
    alpha: float


def sphere_arrays(r, phi, alpha):
    """Vectorized sphere parametrization; ``alpha`` is the polar angle of z."""
    r, phi, alpha = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, phi, alpha)))
    psi = phi * r
    if np.any(np.abs(psi) > TWO_PI * (1 + 1e-14)):
        raise ValueError("|phi * r| exceeds 2 pi: beyond the geodesic lifetime")
    rad = r * _half_sinc(psi)
    t = 2.0 * r * r * _height_factor(psi)
    return np.stack([rad * np.cos(alpha), rad * np.sin(alpha), t], axis=-1)


def sphere_point(sp: SpherePoint) -> np.ndarray:
    return sphere_arrays(sp.r, sp.phi, sp.alpha)


# -- sphere geometry -----------------------------------------------------------

def _sweep_for_radius(rho: float) -> float:
    """Sweep angle in [0, 2 pi] at which the unit sphere has horizontal radius ``rho``."""
    if rho >= 1.0:
        return 0.0
    if rho <= 0.0:
        return TWO_PI
    lo, hi = 0.0, TWO_PI
    # |z| = sinc(psi/2) is strictly decreasing on [0, 2 pi]; plain bisection
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(_half_sinc(mid)) > rho:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    return 0.5 * (lo + hi)


def hemisphere_height(rho_z: float) -> float:
    """Height ``u(|z|)`` of the upper unit hemisphere over horizontal radius ``rho_z``."""
    if not 0.0 <= rho_z <= 1.0:
        raise ValueError(f"horizontal radius must lie in [0, 1], got {rho_z}")
    psi = _sweep_for_radius(rho_z)
    return float(2.0 * _height_factor(psi))


def hull_height(rho_z: float, r: float) -> float:
    """Upper boundary height of the Euclidean convex hull of ``B(O, r)``; -inf outside."""
    if rho_z > r:
        return -math.inf
    if rho_z <= 2.0 / math.pi * r:
        return 2.0 / math.pi * r * r
    return r * r * hemisphere_height(rho_z / r)


def in_convex_hull(p, r: float) -> bool:
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    p = as_points(p)
    rho = float(np.hypot(p[0], p[1]))
    return abs(float(p[2])) <= hull_height(rho, r)


def cone_aperture(lam: float) -> float:
    """Aperture ``a`` with ``{lambda = lam} = Gamma_a u Gamma_-a``."""
    if not lam > 1:
        raise ValueError(f"lifetime ratio must exceed 1, got {lam}")
    if math.isinf(lam):
        return 0.0
    if lam < 2.0:
        u = TWO_PI * (lam - 1.0) / lam
        return float(_ratio_from_complement(u))
    return float(sweep_ratio(TWO_PI / lam))


def north_pole(R: float) -> np.ndarray:
    return np.array([0.0, 0.0, R * R / math.pi])


def dist_to_sphere(p, R: float) -> tuple[float, bool]:
    """Distance from ``p`` inside ``B(O, R)`` (upper half) to the sphere ``S(O, R)``.

    The flag reports whether the distance is realized by the north pole.
    """
    p = as_points(p)
    if p[2] < 0:
        raise ValueError("point must lie in the upper half-space t >= 0")
    if not np.any(p):
        return float(R), False
    sol = solve_polar(p)
    if not sol.r < R:
        raise ValueError(f"point at distance {sol.r} is not inside the open ball of radius {R}")
    if sol.lam <= R / sol.r:
        return float(cc_distance(p, north_pole(R))), True
    return R - sol.r, False


# -- distance between horizontal unit vectors ----------------------------------

def _rho_point(theta):
    theta = np.asarray(theta, dtype=float)
    h = 0.5 * theta
    zero = np.zeros_like(theta)
    return np.stack([2.0 * np.sin(h), zero, 4.0 * np.sin(h) * np.cos(h)], axis=-1)


def _check_angle(theta, closed: bool):
    theta = np.asarray(theta, dtype=float)
    upper_ok = theta <= math.pi if closed else theta < math.pi
    if not np.all((theta > 0) & upper_ok):
        raise ValueError("angle outside the admissible range (0, pi" + ("]" if closed else ")"))
    return theta


def rho(theta):
    """``d((1; 0), (e^{i theta}; 0))`` for theta in (0, pi]."""
    theta = _check_angle(theta, closed=True)
    out = cc_norm(_rho_point(theta))
    return float(out) if np.ndim(out) == 0 else out


def _sweep_by_bisection(theta):
    """Sweep angle ``a`` with ``(1 - cos a)/(a - sin a) = tan(theta/2)`` by bisection."""
    target = np.tan(0.5 * theta)
    lo = np.zeros_like(theta)
    hi = np.full_like(theta, TWO_PI)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        val = 2.0 * np.sin(0.5 * mid) ** 2 / psi_minus_sin(mid)
        # val decreases in mid
        lo = np.where(val > target, mid, lo)
        hi = np.where(val > target, hi, mid)
    return 0.5 * (lo + hi)


def rho_prime(theta):
    """Derivative of :func:`rho` from the implicit-function identity."""
    theta = _check_angle(theta, closed=False)
    a = _sweep_by_bisection(theta)
    half = 0.5 * a
    out = (half / np.sin(half)) * np.sin(half + theta) / cc_norm(_rho_point(theta))
    return float(out) if np.ndim(out) == 0 else out


def lifetime_geodesic_at_unit(R: float) -> np.ndarray:
    """Point at ``s = 1`` on the upward geodesic of lifetime ``R`` from the origin."""
    return geodesic_from_origin(TWO_PI / R, 0.0, 1.0)


def cone_member(p, apex, a: float) -> float:
    """Signed offset ``t' - a |z'|^2`` of ``p`` relative to the cone ``Gamma_{apex, a}``."""
    rel = relative(apex, p)
    return rel[..., 2] - a * (rel[..., 0] ** 2 + rel[..., 1] ** 2)


__all__ = [
    "GeodesicParams",
    "PolarSolve",
    "SpherePoint",
    "cc_distance",
    "cc_norm",
    "cone_aperture",
    "cone_member",
    "dist_to_sphere",
    "geodesic_from_origin",
    "geodesic_point",
    "hemisphere_height",
    "hull_height",
    "in_convex_hull",
    "inverse",
    "lifetime_geodesic_at_unit",
    "north_pole",
    "polar_arrays",
    "psi_minus_sin",
    "rho",
    "rho_prime",
    "solve_polar",
    "solve_sweep",
    "sphere_arrays",
    "sphere_point",
    "sweep_ratio",
]
