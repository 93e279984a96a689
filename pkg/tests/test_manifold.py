import numpy as np
import pytest

from nlsground import (
    NotInLambdaError,
    RadialFunction,
    ZeroFunctionError,
    dilate,
    energy,
    fiber_profile,
    h1_norm_sq,
    lambda_membership,
    pohozaev,
    pohozaev_limit,
    project_to_M,
)
from conftest import gaussian_bump, random_bumps


def admissible_bumps(ctx, grid, rng, count, width_range=(0.5, 5.0),
                     center_max=5.0):
    """Random bumps rescaled in amplitude until admissible."""
    out = []
    for u in random_bumps(grid, rng, count, amp_range=(0.3, 3.0),
                          width_range=width_range, center_max=center_max):
        vals = u.values
        for _ in range(20):
            cand = RadialFunction(grid, vals)
            member, _ = lambda_membership(ctx, cand)
            if member:
                out.append(cand)
                break
            vals = 2.0 * vals
    return out


def test_membership_signs(ctx_auto, grid4096):
    big = gaussian_bump(grid4096, 3.0, 1.0)
    member, q = lambda_membership(ctx_auto, big)
    assert member and q < 0.0
    tiny = gaussian_bump(grid4096, 0.01, 1.0)
    member, q = lambda_membership(ctx_auto, tiny)
    assert (not member) and q > 0.0


def test_membership_rejects_zero(ctx_auto, grid4096):
    z = RadialFunction(grid4096, np.zeros(grid4096.n))
    with pytest.raises(ZeroFunctionError):
        lambda_membership(ctx_auto, z)
    with pytest.raises(ZeroFunctionError):
        fiber_profile(ctx_auto, z, np.array([0.5, 1.0, 2.0]))


def test_nonpositive_dilation_functional_implies_membership(ctx_well, grid4096):
    # nonzero u with P(u) <= 0 or P_inf(u) <= 0 must be admissible
    rng = np.random.default_rng(4)
    checked = 0
    for u in random_bumps(grid4096, rng, 60):
        if min(pohozaev(ctx_well, u), pohozaev_limit(ctx_well, u)) <= 0.0:
            member, q = lambda_membership(ctx_well, u)
            assert q < 0.0
            assert member
            checked += 1
    assert checked > 5


def test_projection_basic(ctx_auto, grid4096):
    u = gaussian_bump(grid4096, 3.0, 1.0)
    proj = project_to_M(ctx_auto, u)
    assert proj.sign_changes == 1
    assert proj.residual <= proj.tolerance
    assert abs(pohozaev(ctx_auto, proj.projected)) == proj.residual


def test_projection_fixed_point(ctx_auto, grid4096):
    u = gaussian_bump(grid4096, 3.0, 1.0)
    star = project_to_M(ctx_auto, u).projected
    again = project_to_M(ctx_auto, star)
    assert again.t_u == pytest.approx(1.0, abs=1e-3)


def test_projection_group_law(ctx_auto, grid4096):
    u = gaussian_bump(grid4096, 3.0, 1.0)
    star = project_to_M(ctx_auto, u).projected
    for s in (0.5, 1.7):
        moved = dilate(star, s)
        t_v = project_to_M(ctx_auto, moved).t_u
        assert t_v * s == pytest.approx(1.0, abs=1e-3)


def test_projection_requires_membership(ctx_auto, grid4096):
    tiny = gaussian_bump(grid4096, 0.01, 1.0)
    with pytest.raises(NotInLambdaError):
        project_to_M(ctx_auto, tiny)


def test_fiber_profile_shape(ctx_auto, grid4096):
    u = gaussian_bump(grid4096, 3.0, 1.0)
    t = np.geomspace(0.02, 20.0, 41)
    rows = fiber_profile(ctx_auto, u, t)
    zeta = rows[:, 1]
    assert zeta[0] > 0.0 and zeta[0] < 0.1 * np.max(zeta)   # -> 0 as t -> 0
    assert zeta[-1] < 0.0                                    # negative for large t
    t_u = project_to_M(ctx_auto, u).t_u
    t_peak = rows[np.argmax(zeta), 0]
    # peak of the tabulated fiber sits in the grid cell containing t_u
    assert abs(np.log(t_peak / t_u)) < np.log(t[1] / t[0]) * 1.5


def test_fiber_slope_matches_dilation_functional(ctx_well, grid4096):
    # d/dt zeta = P(u_t)/t: central differences of zeta agree in sign with
    # P away from the root
    u = gaussian_bump(grid4096, 3.0, 1.0)
    t = np.geomspace(0.2, 5.0, 33)
    rows = fiber_profile(ctx_well, u, t)
    zeta, p = rows[:, 1], rows[:, 2]
    dz = (zeta[2:] - zeta[:-2]) / (t[2:] - t[:-2])
    pm = p[1:-1]
    scale = np.max(np.abs(pm))
    for slope, pval in zip(dz, pm):
        if abs(pval) > 1e-3 * scale:
            assert np.sign(slope) == np.sign(pval)


def test_projection_maximizes_fiber(ctx_well, grid4096):
    # interpolated-dilation comparison, restricted to dilations that stay
    # inside the domain; beyond r_max the truncation breaks the
    # full-space fiber comparison
    rng = np.random.default_rng(9)
    checked = 0
    for u in admissible_bumps(ctx_well, grid4096, rng, 10,
                              width_range=(0.5, 1.2), center_max=1.0):
        support = grid4096.r[np.nonzero(np.abs(u.values) >
                                        1e-10 * np.max(np.abs(u.values)))[0][-1]]
        proj = project_to_M(ctx_well, u)
        level = energy(ctx_well, proj.projected)
        tol = 1e-3 * (1.0 + h1_norm_sq(proj.projected))
        for t in np.geomspace(0.25, 4.0, 64):
            tau = float(t * proj.t_u)
            if tau * support > grid4096.r_max:
                continue
            checked += 1
            assert level >= energy(ctx_well, dilate(u, tau)) - tol
    assert checked > 100


def test_projection_uniqueness_sample(ctx_well, grid4096):
    rng = np.random.default_rng(10)
    bumps = admissible_bumps(ctx_well, grid4096, rng, 60)
    assert len(bumps) >= 50
    for u in bumps:
        proj = project_to_M(ctx_well, u)
        assert proj.sign_changes == 1
        assert energy(ctx_well, proj.projected) > 0.0
        assert h1_norm_sq(proj.projected) > 1e-4


def test_fiber_profile_validates_grid(ctx_auto, grid4096):
    u = gaussian_bump(grid4096, 3.0, 1.0)
    with pytest.raises(ValueError):
        fiber_profile(ctx_auto, u, np.array([2.0, 1.0]))  # not ascending
    with pytest.raises(ValueError):
        fiber_profile(ctx_auto, u, np.array([-1.0, 1.0]))
