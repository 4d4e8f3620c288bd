"""Fringe visibility versus diffraction order.

Gaussian phase noise that scales with the order p gives
V(p) = V_max exp(-<Phi_1^2> p^2 / 2), which is linear in p^2 after a log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError

_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class VisibilityModel:
    v_max: float
    phi1_sq: float
    v_max_err: float | None = None
    phi1_sq_err: float | None = None

    def __post_init__(self):
        if not (0 < self.v_max <= 1):
            raise DomainError(f"v_max must lie in (0, 1], got {self.v_max!r}")
        if not self.phi1_sq >= 0:
            raise DomainError(f"phi1_sq must be >= 0, got {self.phi1_sq!r}")


def visibility(model: VisibilityModel, p):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise DomainError("diffraction order must be >= 0")
    return (model.v_max * np.exp(-model.phi1_sq * p**2 / 2.0))[()]


def fit_visibility(data) -> VisibilityModel:
    """Weighted linear regression of ln V on p^2.

    ``data`` holds ``(p, v)`` or ``(p, v, sigma_v)`` rows.  With sigma_v on
    every row the weights are 1/(sigma_v/v)^2 and the parameter covariance
    is absolute; otherwise the fit is unweighted and the covariance is
    scaled by the residual variance (undefined, hence ``None``, for two
    points).  A value of ``sigma_v = None`` counts as missing.
    """
    rows = [tuple(r) + (None,) * (3 - len(r)) for r in data]
    if len({r[0] for r in rows}) < 2:
        raise FitError("need at least two distinct diffraction orders")
    p = np.array([r[0] for r in rows], dtype=float)
    v = np.array([r[1] for r in rows], dtype=float)
    if np.any(~((v > 0) & (v <= 1))):
        raise DomainError("visibilities must lie in (0, 1]")
    sigmas = [r[2] for r in rows]
    weighted = all(s is not None for s in sigmas)
    if weighted:
        sigma_ln = np.array(sigmas, dtype=float) / v
        if np.any(~(sigma_ln > 0)):
            raise DomainError("sigma_v must be > 0")
        weights = 1.0 / sigma_ln**2
    else:
        weights = np.ones_like(v)

    design = np.column_stack([np.ones_like(p), p**2])
    y = np.log(v)
    normal = design.T @ (weights[:, None] * design)
    if abs(np.linalg.det(normal)) <= 1e-14 * np.abs(normal).max() ** 2:
        raise FitError("degenerate design matrix")
    cov = np.linalg.inv(normal)
    intercept, slope = cov @ (design.T @ (weights * y))

    dof = len(rows) - 2
    if weighted:
        scale = 1.0
    elif dof > 0:
        resid = y - (intercept + slope * p**2)
        scale = float(resid @ resid) / dof
    else:
        scale = None

    v_max = math.exp(intercept)
    phi1_sq = -2.0 * slope
    if scale is None:
        v_err = phi_err = None
    else:
        v_err = v_max * math.sqrt(scale * cov[0, 0])
        phi_err = 2.0 * math.sqrt(scale * cov[1, 1])
    if v_max > 1 + _DOMAIN_SLACK or phi1_sq < -_DOMAIN_SLACK:
        raise FitError(f"fit left the model domain (v_max={v_max:.6g}, phi1_sq={phi1_sq:.6g})")
    # roundoff on exact boundary data
    return VisibilityModel(min(v_max, 1.0), max(phi1_sq, 0.0), v_err, phi_err)
