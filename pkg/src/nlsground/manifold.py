"""Admissible set, fiber profiles, and projection onto the constraint set.

The constraint set M collects nonzero functions with vanishing
dilation-identity functional P.  For u in the admissible set (those with
int [V_inf u^2 / 2 - lam F(u)] < 0) the fiber t -> I(u(x/t)) has a unique
maximizer t_u, found here as the unique sign change of t -> P(u_t) and
polished by bisection on log t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    MultipleSignChangesError,
    NoSignChangeError,
    NotInLambdaError,
    ZeroFunctionError,
)
from .functionals import FiberValues, FunctionalContext, fiber_values
from .grid import RadialFunction, dilate, h1_norm_sq

__all__ = [
    "FiberProjection",
    "lambda_membership",
    "fiber_profile",
    "project_to_M",
]

# membership strictness: q(u) must undercut zero by this relative margin
LAMBDA_MARGIN = 1e-10
# default log-t search bracket
T_BRACKET = (1e-3, 1e3)
SCAN_POINTS = 97
BISECT_LOG_TOL = 1e-12


@dataclass(frozen=True)
class FiberProjection:
    """Result of projecting u onto the constraint set along its fiber."""

    t_u: float
    projected: RadialFunction
    residual: float          # |P(projected)| measured on the dilated profile
    bracket: tuple
    sign_changes: int
    tolerance: float


def lambda_membership(ctx: FunctionalContext, u: RadialFunction):
    """Admissibility of u: returns (member, q) with
    q = int [ (V_inf/2) u^2 - lam F(u) ] and member <=> q < -margin."""
    if u.is_zero():
        raise ZeroFunctionError("membership is undefined for the zero function")
    fv = fiber_values(ctx, u)
    q = 0.5 * ctx.V.v_inf * fv.mass - ctx.lam * fv.f_int
    member = q < -LAMBDA_MARGIN * h1_norm_sq(u)
    return bool(member), float(q)


def fiber_profile(ctx: FunctionalContext, u: RadialFunction,
                  t_grid: np.ndarray) -> np.ndarray:
    """Tabulate (t, zeta(t), P(u_t)) along the fiber.

    Returns an array of shape (len(t_grid), 3).  The finite-difference
    slope of zeta agrees in sign with P(u_t)/t away from the root.
    """
    if u.is_zero():
        raise ZeroFunctionError("fiber is undefined for the zero function")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be positive and strictly ascending")
    fv = fiber_values(ctx, u)
    zeta = fv.energy_at(t)
    p = fv.pohozaev_at(t)
    return np.column_stack([t, zeta, p])


def _scan_bracket(fv: FiberValues, t_lo: float, t_hi: float, points: int):
    """Sign-change scan of P along the fiber on a log grid."""
    ts = np.geomspace(t_lo, t_hi, points)
    ps = fv.pohozaev_at(ts)
    sign = np.sign(ps)
    # treat exact zeros as positive side (P > 0 for small t)
    sign[sign == 0.0] = 1.0
    flips = np.nonzero(np.diff(sign) != 0.0)[0]
    return ts, ps, flips


def project_to_M(ctx: FunctionalContext, u: RadialFunction,
                 t_bracket: tuple = T_BRACKET,
                 scan_points: int = SCAN_POINTS) -> FiberProjection:
    """Dilate u onto the constraint set: find the root of t -> P(u_t).

    Requires u admissible (checked).  The root is bracketed by a sign
    scan on a log grid and polished by bisection to |d log t| < 1e-12;
    exactly one sign change is demanded, anything else raises.
    """
    member, q = lambda_membership(ctx, u)
    if not member:
        raise NotInLambdaError(
            f"u is not admissible (q = {q:.6g} >= 0); no fiber maximizer exists")
    fv = fiber_values(ctx, u)
    ts, ps, flips = _scan_bracket(fv, t_bracket[0], t_bracket[1], scan_points)
    if flips.size == 0:
        raise NoSignChangeError(
            f"P(u_t) has no sign change on [{t_bracket[0]:g}, {t_bracket[1]:g}]")
    if flips.size > 1:
        raise MultipleSignChangesError(
            f"P(u_t) changes sign {flips.size} times on the bracket; "
            "refine the grid instead of picking a root")
    i = int(flips[0])
    lo, hi = np.log(ts[i]), np.log(ts[i + 1])
    p_lo = ps[i]
    while hi - lo > BISECT_LOG_TOL:
        mid = 0.5 * (lo + hi)
        p_mid = float(fv.pohozaev_at(np.exp(mid))[0])
        if (p_mid > 0.0) == (p_lo > 0.0):
            lo = mid
            p_lo = p_mid
        else:
            hi = mid
    t_u = float(np.exp(0.5 * (lo + hi)))
    projected = dilate(u, t_u)
    from .functionals import pohozaev

    residual = abs(pohozaev(ctx, projected))
    tol = 5e-3 * (1.0 + h1_norm_sq(projected))
    return FiberProjection(
        t_u=t_u,
        projected=projected,
        residual=residual,
        bracket=(float(ts[i]), float(ts[i + 1])),
        sign_changes=int(flips.size),
        tolerance=tol,
    )
