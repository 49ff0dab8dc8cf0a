"""A small zoo of biLipschitz self-maps of the Heisenberg group.

Every map is an immutable dataclass that is callable on point arrays of
shape ``(..., 3)``:

* :class:`Dilation` ``(z; t) -> (lam z; lam^2 t)``
* :class:`Spiral` ``(z; t) -> (z e^{ik log|z|}; t - k|z|^2)``
* :class:`Morphism` ``(z; t) -> (A z; det(A) t)``
* :class:`IsometryMap` wrapping :class:`heisenberg.group.Isometry`
* :class:`KRFlow` time-``s`` flow of the contact field generated by a potential
* :class:`Composition` applied right to left
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import group
from .geodesics import cc_distance
from .group import Isometry, as_points

log = logging.getLogger(__name__)


class NumericError(ArithmeticError):
    """An integration or evaluation produced non-finite values."""


# -- potentials ------------------------------------------------------------------

Scalar = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PotentialField:
    """Scalar potential ``p`` with its horizontal derivatives ``Xp`` and ``Yp``.

    ``c0`` bounds ``|X^2 p| + |Y^2 p| + |XY p| + |YX p|`` over the whole group.
    """

    id: str
    value: Scalar
    xp: Scalar
    yp: Scalar
    c0: float

    def __call__(self, p):
        p = as_points(p)
        return self.value(p[..., 0], p[..., 1], p[..., 2])


def _along(p, direction, h):
    """Right translation ``p . (h e)`` moves along the left-invariant field ``e``."""
    step = np.zeros(3)
    step[direction] = h
    return group.multiply(p, step)


def audit_potential(pf: PotentialField, n: int = 64, seed: int = 0, h: float = 1e-5, tol: float = 1e-6) -> float:
    """Compare ``Xp``, ``Yp`` with central differences along X and Y.

    Returns the worst discrepancy; raises if it exceeds ``tol``.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-2.0, 2.0, size=(n, 3))
    worst = 0.0
    for axis, deriv in ((0, pf.xp), (1, pf.yp)):
        fd = (pf(_along(pts, axis, h)) - pf(_along(pts, axis, -h))) / (2 * h)
        exact = deriv(pts[:, 0], pts[:, 1], pts[:, 2])
        worst = max(worst, float(np.max(np.abs(fd - exact))))
    if worst > tol:
        raise ValueError(f"potential {pf.id!r}: horizontal derivatives disagree with finite differences ({worst:.2e})")
    return worst


POTENTIALS: dict[str, PotentialField] = {}


def register_potential(pf: PotentialField) -> PotentialField:
    audit_potential(pf)
    POTENTIALS[pf.id] = pf
    return pf


def constant_potential(c: float) -> PotentialField:
    zero = lambda x, y, t: np.zeros_like(x)  # noqa: E731
    return PotentialField(f"const_{c:g}", lambda x, y, t: np.full_like(x, c), zero, zero, 0.0)


def _bump(x, y):
    return np.exp(-(x * x + y * y))


def _estimate_c0_bump() -> float:
    # p = x y e^{-|z|^2} is t-independent, so X and Y act as d/dx and d/dy
    g = np.linspace(-4.0, 4.0, 801)
    x, y = np.meshgrid(g, g)
    b = _bump(x, y)
    pxx = x * y * (4 * x * x - 6) * b
    pyy = x * y * (4 * y * y - 6) * b
    pxy = (1 - 2 * x * x) * (1 - 2 * y * y) * b
    return float(np.max(np.abs(pxx) + np.abs(pyy) + 2 * np.abs(pxy)))


register_potential(constant_potential(1.0))
POTENTIALS["one"] = POTENTIALS.pop("const_1")
register_potential(PotentialField(
    "x",
    lambda x, y, t: x,
    lambda x, y, t: np.ones_like(x),
    lambda x, y, t: np.zeros_like(x),
    0.0,
))
register_potential(PotentialField(
    "sin_x",
    lambda x, y, t: np.sin(x),
    lambda x, y, t: np.cos(x),
    lambda x, y, t: np.zeros_like(x),
    1.0,
))
register_potential(PotentialField(
    "xy_bump",
    lambda x, y, t: x * y * _bump(x, y),
    lambda x, y, t: y * (1 - 2 * x * x) * _bump(x, y),
    lambda x, y, t: x * (1 - 2 * y * y) * _bump(x, y),
    _estimate_c0_bump(),
))


def kr_vector_field(pf: PotentialField, p) -> np.ndarray:
    """Coordinates of ``-1/4 (Yp) X + 1/4 (Xp) Y + p T`` at ``p``.

    With ``X = d_x + 2y d_t``, ``Y = d_y - 2x d_t`` and ``T = d_t``.
    """
    p = as_points(p)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    a = -0.25 * pf.yp(x, y, t)
    b = 0.25 * pf.xp(x, y, t)
    return np.stack([a, b, 2.0 * y * a - 2.0 * x * b + pf.value(x, y, t)], axis=-1)


def integrate_flow(pf: PotentialField, s: float, p, h: float = 1e-3) -> np.ndarray:
    """Classical RK4 with ``ceil(|s|/h)`` equal steps from ``p`` over time ``s``."""
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    state = np.array(as_points(p), dtype=float)
    if s == 0:
        return state
    n = max(1, math.ceil(abs(s) / h - 1e-9))
    dt = s / n
    field_ = lambda q: kr_vector_field(pf, q)  # noqa: E731
    for _ in range(n):
        k1 = field_(state)
        k2 = field_(state + 0.5 * dt * k1)
        k3 = field_(state + 0.5 * dt * k2)
        k4 = field_(state + dt * k3)
        state = state + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise NumericError(f"flow of {pf.id!r} left the finite range")
    return state


# -- the map zoo --------------------------------------------------------------------

@dataclass(frozen=True)
class Dilation:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"dilation factor must be positive, got {self.lam}")

    def __call__(self, p):
        return group.dilate(self.lam, p)

    def describe(self) -> str:
        return f"dilation:lam={self.lam!r}"


@dataclass(frozen=True)
class Spiral:
    """Vertical-lines-preserving spiral; the vertical axis is fixed pointwise."""

    k: float

    def __call__(self, p):
        p = as_points(p)
        x, y, t = p[..., 0], p[..., 1], p[..., 2]
        r2 = x * x + y * y
        with np.errstate(divide="ignore"):
            ang = np.where(r2 > 0, 0.5 * self.k * np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
        c, s = np.cos(ang), np.sin(ang)
        return np.stack([c * x - s * y, s * x + c * y, t - self.k * r2], axis=-1)

    def describe(self) -> str:
        return f"spiral:k={self.k!r}"


def spiral_bilip_bound(k: float) -> float:
    """BiLipschitz bound ``(|k| + sqrt(|k| + 4)) / 2`` for the spiral.

    Dominates the exact shear norm :func:`spiral_jacobian_norm` for ``|k| <= 1``.
    """
    return 0.5 * (abs(k) + math.sqrt(abs(k) + 4.0))


def spiral_jacobian_norm(k: float) -> float:
    """Largest singular value of the shear ``[[1, 0], [k, 1]]``."""
    return 0.5 * (abs(k) + math.sqrt(k * k + 4.0))


@dataclass(frozen=True)
class Morphism:
    """Graded group endomorphism ``(z; t) -> (A z; det(A) t)``."""

    a: float
    b: float
    c: float
    d: float

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __call__(self, p):
        p = as_points(p)
        x, y, t = p[..., 0], p[..., 1], p[..., 2]
        return np.stack([self.a * x + self.b * y, self.c * x + self.d * y, self.det * t], axis=-1)

    def describe(self) -> str:
        return f"morphism:a={self.a!r},b={self.b!r},c={self.c!r},d={self.d!r}"


@dataclass(frozen=True)
class IsometryMap:
    iso: Isometry = field(default_factory=Isometry)

    def __call__(self, p):
        return group.apply_isometry(self.iso, p)

    def describe(self) -> str:
        w = "/".join(repr(v) for v in self.iso.w)
        return f"isometry:theta={self.iso.theta!r},m={self.iso.m},w={w}"


@dataclass(frozen=True)
class KRFlow:
    potential: str
    s: float
    h: float = 1e-3

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"flow step must be positive, got {self.h}")
        if self.potential not in POTENTIALS:
            raise KeyError(f"unknown potential {self.potential!r}; known: {sorted(POTENTIALS)}")

    def __call__(self, p):
        return integrate_flow(POTENTIALS[self.potential], self.s, p, self.h)

    def describe(self) -> str:
        return f"krflow:p={self.potential},s={self.s!r},h={self.h!r}"


@dataclass(frozen=True)
class Composition:
    maps: tuple

    def __post_init__(self):
        if not self.maps:
            raise ValueError("a composition needs at least one map")
        object.__setattr__(self, "maps", tuple(self.maps))

    def __call__(self, p):
        out = as_points(p)
        for m in reversed(self.maps):
            out = m(out)
        return out

    def describe(self) -> str:
        return " o ".join(m.describe() for m in self.maps)


MapDescriptor = Dilation | Spiral | Morphism | IsometryMap | KRFlow | Composition


def eval_map(m, p) -> np.ndarray:
    return m(p)


def phi_conjugate(m, p) -> np.ndarray:
    """``f(p)^{-1} . p``."""
    return group.multiply(group.inverse(m(p)), p)


@dataclass(frozen=True)
class BilipEstimate:
    upper: float
    lower: float
    skipped: int = 0


def bilip_estimate(m, first, second) -> BilipEstimate:
    """Extreme distance ratios ``d(f P, f Q) / d(P, Q)`` over sampled pairs."""
    first, second = as_points(first), as_points(second)
    base = np.atleast_1d(cc_distance(first, second))
    keep = base > 0
    skipped = int(np.count_nonzero(~keep))
    if skipped:
        log.warning("bilip_estimate: skipped %d coincident pairs", skipped)
    if not keep.any():
        raise ValueError("no pair of distinct points to estimate from")
    image = np.atleast_1d(cc_distance(m(first), m(second)))
    ratio = image[keep] / base[keep]
    return BilipEstimate(float(ratio.max()), float(ratio.min()), skipped)


# -- parsing "name:key=value,..." descriptors ------------------------------------

def _kv(text: str) -> dict[str, str]:
    out = {}
    for item in filter(None, text.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def parse_map(text: str):
    """Build a map from e.g. ``spiral:k=0.05``, ``dilation:eps=1e-3`` or
    ``krflow:p=sin_x,s=0.1,h=1e-3``. Compose with ``|`` (applied right to left)."""
    if "|" in text:
        return Composition(tuple(parse_map(part) for part in text.split("|")))
    name, _, rest = text.partition(":")
    kw = _kv(rest)
    name = name.strip().lower()
    if name == "dilation":
        if "eps" in kw:
            return Dilation(1.0 + float(kw["eps"]))
        return Dilation(float(kw.get("lam", 1.0)))
    if name == "spiral":
        return Spiral(float(kw["k"]))
    if name == "krflow":
        return KRFlow(kw["p"], float(kw.get("s", 0.0)), float(kw.get("h", 1e-3)))
    if name == "morphism":
        return Morphism(*(float(kw.get(key, dflt)) for key, dflt in (("a", 1), ("b", 0), ("c", 0), ("d", 1))))
    if name in ("isometry", "rotation"):
        w = tuple(float(v) for v in kw["w"].split("/")) if "w" in kw else (0.0, 0.0, 0.0)
        return IsometryMap(Isometry(w, float(kw.get("theta", 0.0)), int(kw.get("m", 0))))
    raise ValueError(f"unknown map {name!r}")
