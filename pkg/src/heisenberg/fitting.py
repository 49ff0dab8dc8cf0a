"""Least-squares fitting of an isometry ``L_w o R_theta o J^m`` to point pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import group
from .geodesics import cc_distance
from .group import Isometry, as_points


@dataclass(frozen=True)
class FitResult:
    iso: Isometry
    residual: float

    @property
    def A_matrix(self) -> np.ndarray:
        return self.iso.matrix

    @property
    def translation(self) -> np.ndarray:
        return np.asarray(self.iso.w)

    @property
    def m(self) -> int:
        return self.iso.m

    def to_json(self) -> dict:
        return {**self.iso.to_json(), "A": self.A_matrix.tolist(), "residual": self.residual}


def _complex(p):
    return p[..., 0] + 1j * p[..., 1]


def _check_spread(z: np.ndarray, centered: bool):
    pts = np.stack([z.real, z.imag])
    if centered:
        pts = pts - pts.mean(axis=1, keepdims=True)
    sv = np.linalg.svd(pts, compute_uv=False) if pts.shape[1] >= 2 else np.array([0.0, 0.0])
    if sv.size < 2 or sv[0] == 0 or sv[1] <= 1e-12 * sv[0]:
        raise ValueError("degenerate geometry: need at least two non-collinear horizontal samples")


def _fit_branch(src, dst, m, fix_origin):
    q = group.reflect(src) if m else src
    qz, fz = _complex(q), _complex(dst)
    if fix_origin:
        cross = np.sum(fz * np.conj(qz))
    else:
        cross = np.sum((fz - fz.mean()) * np.conj(qz - qz.mean()))
    theta = float(np.angle(cross)) if cross != 0 else 0.0
    rotated = group.rotate(theta, q)
    if fix_origin:
        w = (0.0, 0.0, 0.0)
    else:
        wz = fz.mean() - _complex(rotated).mean()
        shifted = group.multiply(np.array([wz.real, wz.imag, 0.0]), rotated)
        # vertical residuals enter the distance at power 1/2; the median is robust to that
        wt = float(np.median(dst[..., 2] - shifted[..., 2]))
        w = (float(wz.real), float(wz.imag), wt)
    iso = Isometry(w, theta, m)
    resid = float(np.mean(np.atleast_1d(cc_distance(iso(src), dst)) ** 2))
    return FitResult(iso, resid)


def fit_isometry(src, dst, allow_reflection: bool = True, fix_origin: bool = False) -> FitResult:
    """Fit ``T`` with ``T(src) ~ dst``.

    For each reflection count the rotation comes from the horizontal
    cross-covariance, the horizontal translation from the means and the
    vertical translation from the median of vertical residuals. The
    candidate with the smaller mean squared control distance wins.
    ``fix_origin`` restricts to ``T(O) = O``.
    """
    src = np.atleast_2d(as_points(src))
    dst = np.atleast_2d(as_points(dst))
    if src.shape != dst.shape:
        raise ValueError("src and dst must have the same shape")
    _check_spread(_complex(src), centered=not fix_origin)
    fits = [_fit_branch(src, dst, m, fix_origin) for m in ((0, 1) if allow_reflection else (0,))]
    return min(fits, key=lambda f: f.residual)


def lower_bound_dilation_minimax(eps: float, R: float = 1.0) -> float:
    """Two-point lower bound for ``sup_{B(O,R)} d(delta_{1+eps} P, T P)`` over all isometries.

    Only ``O`` and the north pole ``(0; R^2/pi)`` are used. A horizontal shift
    cannot help, so the best ``T`` is the central shift by half the vertical
    gap, ``s = (2 eps + eps^2) R^2 / (2 pi)``, which leaves both points at
    distance ``sqrt(pi s)``.
    """
    s = (2 * eps + eps * eps) * R * R / (2 * math.pi)
    return math.sqrt(math.pi * s)
