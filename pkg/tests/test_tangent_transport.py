import numpy as np
import pytest

from src.errors import NearBreakingError
from src.metric.distances import gaussian
from src.metric.finsler import TangentFrame, finsler_cost
from src.metric.tangent_transport import evolve_tangent, growth_report, verify_growth
from src.smooth.novikov_solver import evolve_smooth, novikov_rhs
from src.smooth.stepper import FieldTrajectory


@pytest.fixture
def solution(fine_bump):
    return evolve_smooth(fine_bump, 0.2, dt=1e-3)


def generic_frame(u):
    return TangentFrame.from_fields(gaussian(u, 0.1, 0.8, 0.4))


def test_zero_frame_stays_zero(solution):
    frames = evolve_tangent(solution, TangentFrame.zeros(solution.states[0].n))
    assert len(frames) == len(solution)
    assert all(np.all(f.v == 0) and np.all(f.w == 0) for f in frames)


def test_time_translation_tangent_follows_u_t(solution):
    rates = novikov_rhs(solution.states[0])
    tf0 = TangentFrame(rates.u_t.values, rates.u_xt.values, np.zeros(rates.u_t.n), np.zeros(rates.u_t.n))
    frames = evolve_tangent(solution, tf0)
    expected = novikov_rhs(solution.states[-1]).u_t.values
    assert np.max(np.abs(frames[-1].v - expected)) <= 1e-3


def test_space_translation_keeps_the_shift_consistent(solution):
    frames = evolve_tangent(solution, TangentFrame.translation(solution.states[0], 1.0))
    u = solution.states[-1]
    residual = frames[-1].v + u.derivative().values * frames[-1].w
    assert np.max(np.abs(residual)) <= 1e-3
    np.testing.assert_allclose(frames[-1].w, 1.0, atol=1e-3)


def test_guard_propagates_near_breaking(grid):
    steep = grid.like(np.exp(-(grid.x / 0.05) ** 2))
    traj = FieldTrajectory(states=[grid, steep], times=[0.0, 1e-3])
    with pytest.raises(NearBreakingError):
        evolve_tangent(traj, TangentFrame.zeros(grid.n))


def test_growth_report_of_exponential_norms():
    t = np.linspace(0.0, 1.0, 11)
    report = growth_report(t, 2.0 * np.exp(0.3 * t))
    assert report.fitted_rate == pytest.approx(0.3)
    assert report.envelope_rate == pytest.approx(0.3)
    assert report.max_ratio == pytest.approx(np.exp(0.3))
    assert list(report.to_frame().columns) == ["t", "norm"]


def test_growth_report_of_zero_norms():
    report = growth_report([0.0, 0.5, 1.0], [0.0, 0.0, 0.0])
    assert report.fitted_rate == report.envelope_rate == report.max_ratio == 0.0


def test_zero_tangent_has_zero_growth(solution):
    frames = evolve_tangent(solution, TangentFrame.zeros(solution.states[0].n))
    report = verify_growth(solution, frames)
    assert report.norms == [0.0] * len(solution)
    assert report.fitted_rate == 0.0


def test_generic_tangent_obeys_exponential_bound(solution):
    frames = evolve_tangent(solution, generic_frame(solution.states[0]))
    report = verify_growth(solution, frames)
    norms = np.array(report.norms)
    t = np.array(report.times) - report.times[0]
    assert np.all(norms <= np.exp(report.envelope_rate * t) * norms[0] * (1 + 1e-12))
    assert np.all(norms <= np.exp(report.fitted_rate * t) * norms[0] * 1.05)
    assert np.isfinite(report.fitted_rate)


def test_translation_growth_is_controlled_by_the_horizontal_cost(solution):
    frames = evolve_tangent(solution, TangentFrame.translation(solution.states[0], 1.0))
    report = verify_growth(solution, frames)
    for u, norm in zip(solution.states, report.norms):
        horizontal = finsler_cost(u, TangentFrame.translation(u, 1.0)).I1
        assert norm <= horizontal * (1 + 1e-2) + 1e-2


def test_frame_count_must_match(solution):
    with pytest.raises(ValueError):
        verify_growth(solution, [TangentFrame.zeros(solution.states[0].n)])


@pytest.mark.slow
def test_growth_rate_is_stable_under_step_halving(fine_bump):
    rates = []
    for dt in (2e-3, 1e-3):
        traj = evolve_smooth(fine_bump, 0.5, dt=dt)
        frames = evolve_tangent(traj, generic_frame(fine_bump))
        rates.append(verify_growth(traj, frames).fitted_rate)
    assert rates[0] == pytest.approx(rates[1], rel=0.2, abs=1e-2)
