"""L-curve corner selection shared by the two regularized solves."""

import numpy as np


def lcurve_corner(residuals, penalties, floor=1e-300):
    """Index of the maximum-curvature point of the log-log L-curve.

    ``residuals`` and ``penalties`` are evaluated on an increasing grid of
    regularization strengths. Curvature uses three-point finite differences
    with the log of the strength as the curve parameter; points where the
    curve does not move are ignored. Falls back to the first grid point when
    the curve is degenerate.
    """
    r = np.log(np.maximum(np.asarray(residuals, float), floor))
    p = np.log(np.maximum(np.asarray(penalties, float), floor))
    n = r.size
    if n < 3:
        return 0
    s = np.arange(n, dtype=float)
    dr, dp = np.gradient(r, s), np.gradient(p, s)
    ddr, ddp = np.gradient(dr, s), np.gradient(dp, s)
    speed = dr**2 + dp**2
    with np.errstate(invalid="ignore", divide="ignore"):
        kappa = (dr * ddp - ddr * dp) / speed**1.5
    scale = max(np.ptp(r), np.ptp(p), 1e-300)
    moving = speed > (1e-8 * scale) ** 2
    kappa = np.where(moving & np.isfinite(kappa), kappa, -np.inf)
    kappa[0] = kappa[-1] = -np.inf
    if not np.any(np.isfinite(kappa)):
        return 0
    return int(np.argmax(kappa))
