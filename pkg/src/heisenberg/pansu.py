"""Pansu differentials by difference quotients, and ball averages of them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import group
from .geodesics import cc_norm
from .group import as_points

_BATCH = 65536


@dataclass(frozen=True)
class DiffConfig:
    sigma: float = 1e-4
    scheme: str = "central"

    def __post_init__(self):
        if not 0 < self.sigma <= 1:
            raise ValueError(f"sigma must lie in (0, 1], got {self.sigma}")
        if self.scheme not in ("central", "one-sided"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass(frozen=True)
class PansuJacobian:
    """Horizontal 2x2 part of the Pansu differential (stacked over points)."""

    matrix: np.ndarray

    @property
    def det(self) -> np.ndarray:
        m = self.matrix
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def _blowup(m, p, fp_inv, probe, sigma):
    """``delta_{1/sigma}(f(p)^{-1} . f(p . delta_sigma(probe)))``."""
    moved = group.multiply(p, group.dilate(sigma, probe))
    return group.dilate(1.0 / sigma, group.multiply(fp_inv, m(moved)))


def pansu_jacobian(m, p, cfg: DiffConfig = DiffConfig()) -> PansuJacobian:
    """Difference-quotient estimate of ``Jf`` at each point of ``p``."""
    p = as_points(p)
    fp_inv = group.inverse(m(p))
    cols = []
    for e in (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])):
        fwd = _blowup(m, p, fp_inv, e, cfg.sigma)[..., :2]
        if cfg.scheme == "central":
            bwd = _blowup(m, p, fp_inv, -e, cfg.sigma)[..., :2]
            fwd = 0.5 * (fwd - bwd)
        cols.append(fwd)
    return PansuJacobian(np.stack(cols, axis=-1))


def vertical_quotient(m, p, sigma: float) -> np.ndarray:
    """Vertical blow-up against ``(0, 0, 1)``; tends to ``det Jf`` where ``Df`` is a morphism."""
    p = as_points(p)
    fp_inv = group.inverse(m(p))
    return _blowup(m, p, fp_inv, np.array([0.0, 0.0, 1.0]), sigma)[..., 2]


def op_norm(a) -> np.ndarray:
    """Operator 2-norm of 2x2 matrices from the singular values in closed form."""
    a = np.asarray(a, dtype=float)
    fro2 = np.sum(a * a, axis=(-2, -1))
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    disc = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * det * det, 0.0))
    return np.sqrt(0.5 * (fro2 + disc))


def orthogonality_defect(j) -> np.ndarray:
    """``|| J^T J - I ||``; the matrix is symmetric so its norm is its largest |eigenvalue|."""
    a = j.matrix if isinstance(j, PansuJacobian) else np.asarray(j, dtype=float)
    g = np.swapaxes(a, -1, -2) @ a
    p, q, r = g[..., 0, 0] - 1.0, g[..., 0, 1], g[..., 1, 1] - 1.0
    mid = 0.5 * (p + r)
    rad = np.hypot(0.5 * (p - r), q)
    out = np.abs(mid) + rad
    return float(out) if np.ndim(out) == 0 else out


def ball_volume_ratio_box(R: float) -> float:
    """Volume of the sampling box that encloses ``B(O, R)``."""
    return (2.0 * R) ** 2 * (4.0 / math.pi) * R * R


def ball_sample(R: float, n: int, seed: int, return_ratio: bool = False):
    """``n`` points uniform in ``B(O, R)`` by rejection from the enclosing box.

    The box is ``|x|, |y| <= R``, ``|t| <= (2/pi) R^2``. Candidates are drawn
    in fixed batches from one seeded stream, so the output depends only on
    ``(R, n, seed)``.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    hi = np.array([R, R, 2.0 / math.pi * R * R])
    kept, drawn, total = [], 0, 0
    while total < n:
        cand = rng.uniform(-1.0, 1.0, size=(_BATCH, 3)) * hi
        drawn += _BATCH
        inside = cand[cc_norm(cand) < R]
        kept.append(inside)
        total += len(inside)
    pts = np.concatenate(kept)[:n]
    if return_ratio:
        return pts, total / drawn
    return pts


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n: int

    def to_json(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n}


def _jacobians_on_ball(m, R, n, seed, cfg, chunk=_BATCH):
    pts = ball_sample(R, n, seed)
    # difference quotients are only probed away from the vertical axis
    pts = pts[np.hypot(pts[:, 0], pts[:, 1]) > 10.0 * cfg.sigma]
    n = len(pts)
    # chunked so that flow-based maps keep bounded memory
    parts = [pansu_jacobian(m, pts[i:i + chunk], cfg).matrix for i in range(0, n, chunk)]
    return pts, np.concatenate(parts)


def _check_orthogonal(a):
    a = np.asarray(a, dtype=float)
    if a.shape != (2, 2) or np.max(np.abs(a.T @ a - np.eye(2))) > 1e-10:
        raise ValueError("A must be a 2x2 orthogonal matrix")
    return a


def bmo_average(m, A, R: float, n: int = 200_000, seed: int = 0, cfg: DiffConfig = DiffConfig()) -> MCEstimate:
    """Monte Carlo mean of ``||Jf - A||`` over ``B(O, R)``."""
    A = _check_orthogonal(A)
    _, jac = _jacobians_on_ball(m, R, n, seed, cfg)
    vals = op_norm(jac - A)
    used = len(vals)
    return MCEstimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(used)), used)


def exp_integrability_check(m, A, R: float, c_scale: float, n: int = 200_000, seed: int = 0,
                            cfg: DiffConfig = DiffConfig(), _jac=None) -> float:
    """Mean of ``exp(||Jf - (Jf)_B|| / c_scale)`` over ``B(O, R)``; ``inf`` on overflow.

    ``A`` only fixes the reference frame of the report; the oscillation is
    measured against the sample mean of ``Jf``.
    """
    if not c_scale > 0:
        raise ValueError("c_scale must be positive")
    _check_orthogonal(A)
    jac = _jac if _jac is not None else _jacobians_on_ball(m, R, n, seed, cfg)[1]
    dev = op_norm(jac - jac.mean(axis=0))
    with np.errstate(over="ignore"):
        val = float(np.mean(np.exp(dev / c_scale)))
    return val if math.isfinite(val) else math.inf


def min_exp_scale(m, A, R: float, n: int = 200_000, seed: int = 0, cfg: DiffConfig = DiffConfig(),
                  level: float = 2.0, rel_tol: float = 1e-6) -> float:
    """Smallest ``c_scale`` with :func:`exp_integrability_check` at most ``level``.

    The check is decreasing in ``c_scale``; the search is a log-scale bisection
    on one fixed sample.
    """
    _check_orthogonal(A)
    jac = _jacobians_on_ball(m, R, n, seed, cfg)[1]
    dev_max = float(np.max(op_norm(jac - jac.mean(axis=0))))
    if dev_max == 0.0:
        return 0.0
    check = lambda c: exp_integrability_check(m, A, R, c, cfg=cfg, _jac=jac)  # noqa: E731
    lo, hi = dev_max * 1e-6, dev_max
    while check(hi) > level:
        hi *= 2.0
    while check(lo) <= level:
        lo *= 0.5
    while hi / lo - 1.0 > rel_tol:
        mid = math.sqrt(lo * hi)
        if check(mid) <= level:
            hi = mid
        else:
            lo = mid
    return hi
