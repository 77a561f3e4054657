import numpy as np
import pytest

from src.characteristic.semilinear_solver import SingularEvent, integrate_characteristics
from src.characteristic.transform import CharState, to_characteristic, window_labels
from src.core.grid_function import GridFunction
from src.energy.energy_analysis import (
    apriori_bounds,
    char_energy,
    char_totals,
    concentration_report,
    energy_E,
    energy_F,
    energy_time_series,
    k_constant,
)
from src.errors import EnergyInconsistencyError, NoCollisionError
from src.peakons.dynamics import detect_crossing, integrate_peakons, peakon_profile


@pytest.fixture
def peakon(grid):
    return grid.like(np.exp(-np.abs(grid.x)))


@pytest.fixture
def gauss(grid):
    return grid.like(np.exp(-grid.x ** 2))


def test_energies_of_zero(grid):
    assert energy_E(grid) == 0.0
    assert energy_F(grid) == 0.0


def test_energies_of_a_gaussian(gauss):
    root = np.sqrt(np.pi / 2)
    assert energy_E(gauss) == pytest.approx(2 * root, abs=5e-4)
    expected_F = np.sqrt(np.pi) - 16 * (3 * np.sqrt(np.pi) / 128) / 3
    assert energy_F(gauss) == pytest.approx(expected_F, abs=2e-3)


def test_energies_of_a_peakon(peakon):
    assert energy_E(peakon) == pytest.approx(2.0, abs=5e-2)
    assert energy_F(peakon) == pytest.approx(4 / 3, abs=5e-2)


def test_k_constant():
    assert k_constant(2.0, 4 / 3) == pytest.approx(np.sqrt(40))
    assert k_constant(1.0, 2.0) == 0.0
    with pytest.raises(EnergyInconsistencyError):
        k_constant(1.0, 3.0)


def test_zero_field_passes_every_bound(grid):
    report = apriori_bounds(grid)
    assert report.E == report.F == report.K == 0.0
    assert report.passed


def test_peakon_bounds(peakon):
    report = apriori_bounds(peakon)
    assert report.K == pytest.approx(np.sqrt(40), rel=5e-2)
    checks = {c.name: c for c in report.checks}
    assert checks["ux_L3_cubed"].value == pytest.approx(2 / 3, abs=2e-2)
    assert set(checks) == {
        "ux_L3_cubed", "P1_sup", "P1_L2", "dxP1_sup", "dxP1_L2", "P2_sup", "P2_L2", "dxP2_sup", "dxP2_L2",
    }
    assert report.passed
    assert all(c.margin >= 0 for c in report.checks)


def test_smooth_bump_passes_bounds(fine_bump):
    assert apriori_bounds(fine_bump).passed


def test_full_window_matches_x_space_energies(fine_bump):
    s = to_characteristic(fine_bump)
    totals = char_totals(s)
    assert totals.E_win == pytest.approx(energy_E(fine_bump), rel=1e-3)
    assert totals.F_win == pytest.approx(energy_F(fine_bump), rel=1e-3)


def test_zero_state_window():
    s = CharState.zeros(20.0, 256)
    assert char_energy(s, -1.0, 1.0) == (0.0, 0.0, 0.0)


def test_window_must_lie_on_the_grid():
    s = CharState.zeros(20.0, 256)
    with pytest.raises(ValueError):
        char_energy(s, -30.0, 1.0)
    with pytest.raises(ValueError):
        char_energy(s, 1.0, -1.0)


def test_time_series_columns(fine_bump):
    s = to_characteristic(fine_bump)
    frame = energy_time_series([s, s.replace(t=0.1)], -1.0, 1.0)
    assert list(frame.columns) == ["t", "E", "F", "E_win", "F_win", "L_win"]
    assert frame["t"].tolist() == [0.0, 0.1]
    assert frame["E"].iloc[0] == frame["E"].iloc[1]


def collapsing_window():
    """α → π on |Y| ≤ 0.8 as t → 1; α = 0 up to the window edge |Y| = 1 and 0.3 beyond"""
    base = CharState.zeros(20.0, 256).replace(u=np.full(256, 0.5))
    Y = np.abs(base.Y)
    return [
        base.replace(t=t, alpha=np.where(Y <= 0.8, t * np.pi, np.where(Y <= 1.0, 0.0, 0.3)))
        for t in (0.98, 0.99, 1.0)
    ]


def test_concentration_without_events():
    with pytest.raises(NoCollisionError):
        concentration_report(collapsing_window(), [], -1.0, 1.0)


def test_concentration_on_a_collapsed_window():
    traj = collapsing_window()
    report = concentration_report(traj, [SingularEvent(1.0, 0.0, "touch")], -1.0, 1.0)
    assert report.t == 1.0
    assert report.E_vanishes
    assert report.L_positive
    assert report.window.L_win == pytest.approx(1.6, abs=0.1)
    assert report.events == [{"t": 1.0, "Y": 0.0, "kind": "touch"}]
    # the outside density is frozen, so its limit from below is its value on any slice
    before = traj[1]
    outside = char_totals(before).L_win - char_energy(before, -1.0, 1.0).L_win
    assert outside > 0
    assert report.L_outside == pytest.approx(outside, rel=1e-9)
    # the norm drops by the window's share, not by what stays outside
    assert report.w14_jump == pytest.approx(report.window.L_win, rel=1e-2)


def test_concentration_is_read_at_the_first_crossing():
    events = [SingularEvent(0.98, 0.5, "touch"), SingularEvent(1.0, 0.0, "crossing")]
    report = concentration_report(collapsing_window(), events, -1.0, 1.0)
    assert report.t == 1.0
    assert report.events == [{"t": 1.0, "Y": 0.0, "kind": "crossing"}]


def test_concentration_without_earlier_slices():
    at = collapsing_window()[-1]
    report = concentration_report([at], [SingularEvent(1.0, 0.0, "touch")], -1.0, 1.0)
    assert report.w14_jump is None
    assert report.L_outside is None


@pytest.mark.slow
def test_two_peakon_concentration_sharpens_under_refinement(peakon_pair):
    t_star, _ = detect_crossing(integrate_peakons(peakon_pair, 20.0, 1e-3))
    profile = peakon_profile(peakon_pair)
    reports = []
    for n in (1024, 2048, 4096):
        grid = GridFunction.zeros(20.0, n)
        Y1, Y2 = window_labels(grid, peakon_pair.q, profile)
        traj = integrate_characteristics(to_characteristic(grid, profile), 1.05 * t_star, dt=1e-3, store_every=50)
        reports.append(concentration_report(traj.states, traj.events, Y1, Y2))
    assert all(r.E_vanishes and r.L_positive for r in reports)
    fractions = np.array([r.window.E_win / r.E_total for r in reports])
    assert np.all(fractions <= 0.02)
    assert np.all(np.diff(fractions) < 0)
    L = np.array([r.window.L_win for r in reports])
    np.testing.assert_allclose(L, L[-1], rtol=0.1)
