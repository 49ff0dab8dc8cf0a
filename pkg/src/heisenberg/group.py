"""Group algebra of the first Heisenberg group.

Points are arrays whose last axis holds ``(x, y, t)``; every function
broadcasts over leading axes. The product is

    (x, y, t) . (x', y', t') = (x + x', y + y', t + t' + 2 (x' y - x y')).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

ORIGIN = np.zeros(3)


def as_points(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"points need a trailing axis of length 3, got shape {arr.shape}")
    return arr


def point(x: float, y: float, t: float) -> np.ndarray:
    return np.array([x, y, t], dtype=float)


def multiply(p, q) -> np.ndarray:
    p = as_points(p)
    q = as_points(q)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    xq, yq, tq = q[..., 0], q[..., 1], q[..., 2]
    return np.stack([x + xq, y + yq, t + tq + 2.0 * (xq * y - x * yq)], axis=-1)


def inverse(p) -> np.ndarray:
    return -as_points(p)


def relative(p, q) -> np.ndarray:
    """``p^{-1} . q``, the position of ``q`` seen from ``p``."""
    return multiply(inverse(p), q)


def rotate(theta: float, p) -> np.ndarray:
    p = as_points(p)
    c, s = math.cos(theta), math.sin(theta)
    x, y = p[..., 0], p[..., 1]
    return np.stack([c * x - s * y, s * x + c * y, p[..., 2]], axis=-1)


def reflect(p) -> np.ndarray:
    """The map J: (z; t) -> (conj z; -t)."""
    p = as_points(p)
    return np.stack([p[..., 0], -p[..., 1], -p[..., 2]], axis=-1)


def dilate(lam: float, p) -> np.ndarray:
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam}")
    p = as_points(p)
    return np.stack([lam * p[..., 0], lam * p[..., 1], lam * lam * p[..., 2]], axis=-1)


def gauge_distance(p, q) -> np.ndarray | float:
    """Quasi-distance ``|z - z'| + |t' - t - 2 Im(z conj z')|^(1/2)``.

    Globally comparable with the control distance; useful for bounding
    boxes and brackets, never as a substitute for it.
    """
    r = relative(p, q)
    out = np.hypot(r[..., 0], r[..., 1]) + np.sqrt(np.abs(r[..., 2]))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Isometry:
    """Isometry in canonical form ``L_w o R_theta o J^m``."""

    w: tuple[float, float, float] = (0.0, 0.0, 0.0)
    theta: float = 0.0
    m: int = 0

    def __post_init__(self):
        if self.m not in (0, 1):
            raise ValueError(f"reflection count must be 0 or 1, got {self.m}")
        object.__setattr__(self, "w", tuple(float(v) for v in self.w))
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    def __call__(self, p) -> np.ndarray:
        return apply_isometry(self, p)

    @property
    def matrix(self) -> np.ndarray:
        """Horizontal linear part, ``R_theta`` times ``diag(1, -1)^m``."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        rot = np.array([[c, -s], [s, c]])
        return rot @ np.diag([1.0, -1.0]) if self.m else rot

    def compose(self, other: "Isometry") -> "Isometry":
        """Canonical form of ``self o other``."""
        moved = _linear_part(self, np.asarray(other.w))
        w = multiply(np.asarray(self.w), moved)
        sign = -1.0 if self.m else 1.0
        return Isometry(tuple(w), self.theta + sign * other.theta, (self.m + other.m) % 2)

    def inverse(self) -> "Isometry":
        # (L_w R J^m)^-1 = J^m R_-theta L_{w^-1}, then push the translation left.
        lin = Isometry((0.0, 0.0, 0.0), -self.theta if not self.m else self.theta, self.m)
        w = _linear_part(lin, inverse(np.asarray(self.w)))
        return Isometry(tuple(w), lin.theta, lin.m)

    def to_json(self) -> dict:
        return {"w": list(self.w), "theta": self.theta, "m": self.m}

    @classmethod
    def from_json(cls, payload: dict) -> "Isometry":
        return cls(tuple(payload["w"]), payload["theta"], int(payload["m"]))


def _linear_part(g: Isometry, p) -> np.ndarray:
    if g.m:
        p = reflect(p)
    return rotate(g.theta, p)


def apply_isometry(g: Isometry, p) -> np.ndarray:
    return multiply(np.asarray(g.w, dtype=float), _linear_part(g, p))


IDENTITY = Isometry()
