import math

import numpy as np
import pytest

from nlsground import (
    BracketNotFoundError,
    ConstraintInfeasibleError,
    ConvergenceError,
    FunctionalContext,
    PositivityBallError,
    PreconditionError,
    SolveOptions,
    constant_potential,
    fiber_values,
    h1_norm_sq,
    lambda_membership,
    pohozaev_limit,
    project_to_M,
    saturating_nonlinearity,
    shoot_oracle,
    solve_fiber_descent,
    solve_limit_BL,
    sweep_lambda,
    well_potential,
    zero_nonlinearity,
)
from conftest import CUBIC_M, CUBIC_U0, random_bumps


def test_shooting_matches_frozen_oracle(rep_shoot):
    assert rep_shoot.converged
    assert rep_shoot.u_at_zero == pytest.approx(CUBIC_U0, abs=1e-6)
    assert rep_shoot.energy == pytest.approx(CUBIC_M, rel=1e-6)
    assert rep_shoot.pohozaev_residual < 1e-3
    assert rep_shoot.pde_residual < 1e-3
    assert rep_shoot.route == "shooting"


def test_shooting_profile_shape(rep_shoot):
    u = rep_shoot.u_star.values
    assert u[0] == pytest.approx(CUBIC_U0, abs=1e-6)
    assert np.all(u >= 0.0)
    assert np.all(np.diff(u) <= 1e-12)  # monotone decreasing profile


def test_shooting_cubic_identities(rep_shoot, grid4096):
    # stationarity + dilation identity force ||grad u||^2 = 3 ||u||^2 and
    # ground level = ||u||^2 for the cubic problem
    from nlsground import grad_seminorm_sq, l2_norm_sq

    u = rep_shoot.u_star
    assert grad_seminorm_sq(u) == pytest.approx(3.0 * l2_norm_sq(u), rel=1e-4)
    assert rep_shoot.energy == pytest.approx(l2_norm_sq(u), rel=1e-4)


def test_shooting_pohozaev_limit_small(rep_shoot, ctx_auto):
    rel = abs(pohozaev_limit(ctx_auto, rep_shoot.u_star)) / h1_norm_sq(rep_shoot.u_star)
    assert rel < 1e-3


def test_shooting_linear_problem_has_no_bracket(grid4096):
    with pytest.raises(BracketNotFoundError):
        shoot_oracle(1.0, zero_nonlinearity(), 3, grid=grid4096)


def test_shooting_lambda_scaling(grid4096, f_cubic, rep_shoot):
    # u_lam = u_1/sqrt(lam) maps the weighted cubic problem to lam = 1,
    # so lam * m_lam is constant
    rep = shoot_oracle(1.0, f_cubic, 3, lam=0.8, grid=grid4096)
    assert 0.8 * rep.energy == pytest.approx(rep_shoot.energy, rel=1e-8)
    assert rep.u_at_zero == pytest.approx(rep_shoot.u_at_zero / math.sqrt(0.8),
                                          rel=1e-8)


def test_bl_route(rep_bl, rep_shoot):
    assert rep_bl.converged
    assert rep_bl.route == "bl-constrained"
    assert rep_bl.pohozaev_residual < 1e-3
    assert abs(rep_bl.energy - rep_shoot.energy) / rep_shoot.energy < 1e-2


def test_bl_requires_constant_potential(grid4096, f_cubic):
    ctx = FunctionalContext(grid4096, well_potential(1.0, 0.2, 2.0), f_cubic)
    with pytest.raises(PreconditionError):
        solve_limit_BL(ctx)


def test_bl_infeasible_constraint(grid4096):
    ctx = FunctionalContext(grid4096, constant_potential(1.0),
                            saturating_nonlinearity(0.5))
    with pytest.raises(ConstraintInfeasibleError):
        solve_limit_BL(ctx)


def test_fiber_descent_route(rep_fiber, rep_shoot, rep_bl):
    assert rep_fiber.converged
    assert rep_fiber.pohozaev_residual <= rep_fiber.poho_tol
    assert rep_fiber.pde_residual <= rep_fiber.grad_tol
    assert rep_fiber.energy > 0.0
    m = {"A": rep_fiber.energy, "B": rep_bl.energy, "C": rep_shoot.energy}
    assert abs(m["A"] - m["B"]) / m["B"] < 1e-2
    assert abs(m["A"] - m["C"]) / m["C"] < 1e-2


def test_fiber_descent_iteration_cap(ctx_auto):
    with pytest.raises(ConvergenceError):
        solve_fiber_descent(ctx_auto, SolveOptions(max_iters=1))


def test_fiber_descent_well_domination(rep_fiber_well, rep_fiber):
    # with the potential below its limit somewhere, the constrained level
    # cannot exceed the constant-potential level
    assert rep_fiber_well.energy <= rep_fiber.energy + 1e-6


def test_minimax_sampling(ctx_well, rep_fiber_well, grid4096):
    # every admissible sample's fiber maximum sits above the ground level
    rng = np.random.default_rng(14)
    m_hat = rep_fiber_well.energy
    found = 0
    for u in random_bumps(grid4096, rng, 30, amp_range=(0.5, 5.0)):
        member, _ = lambda_membership(ctx_well, u)
        if not member:
            continue
        found += 1
        proj = project_to_M(ctx_well, u)
        zmax = float(fiber_values(ctx_well, u).energy_at(proj.t_u)[0])
        assert zmax >= m_hat - 1e-6 * (1.0 + abs(m_hat))
    assert found > 5


def test_sweep_structure(ctx_well):
    report = sweep_lambda(ctx_well)
    assert 0.5 <= report.lambda_bar < 1.0
    assert report.lambda_bar == pytest.approx(0.9944, abs=2e-3)
    assert report.T == pytest.approx(2.0)
    assert report.zeta0 == pytest.approx(0.25)
    assert report.x_bar == 0.0
    assert len(report.rows) == 3
    lams = [row["lambda"] for row in report.rows]
    assert all(report.lambda_bar < la <= 1.0 for la in lams)
    m_inf = [row["m_inf"] for row in report.rows]
    assert all(m_inf[i + 1] <= m_inf[i] + 1e-12 for i in range(len(m_inf) - 1))
    assert all(row["margin"] > 0.0 for row in report.rows)
    # path bound is uniformly bounded: non-increasing in the weight
    c_bars = [row["c_bar"] for row in report.rows]
    assert max(c_bars) <= c_bars[0] + 1e-12


def test_sweep_respects_requested_grid(ctx_well):
    report = sweep_lambda(ctx_well, [0.9, 0.95, 0.999, 1.0])
    assert 0.9 in report.dropped and 0.95 in report.dropped
    kept = [row["lambda"] for row in report.rows]
    assert kept == [0.999, 1.0]
    assert all(row["margin"] > 0.0 for row in report.rows)


def test_sweep_rejects_constant_potential(ctx_auto):
    with pytest.raises(PositivityBallError):
        sweep_lambda(ctx_auto)


def test_solve_options_validation():
    with pytest.raises(Exception):
        SolveOptions(max_iters=0)
    with pytest.raises(Exception):
        SolveOptions(grad_tol=-1.0)
    gt, pt = SolveOptions().tolerances("shooting")
    assert gt > 0 and pt > 0
    gt2, _ = SolveOptions(grad_tol=1e-5).tolerances("shooting")
    assert gt2 == 1e-5


def test_report_serialization(rep_shoot):
    d = rep_shoot.to_dict()
    assert d["grid"] == {"N": 3, "r_max": 30.0, "n": 4096}
    assert len(d["u"]) == 4096
    assert d["route"] == "shooting"
    d2 = rep_shoot.to_dict(include_profile=False)
    assert "u" not in d2
