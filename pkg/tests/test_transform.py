import json
import logging

import numpy as np
import pytest
from scipy.integrate import quad

from src.characteristic.transform import (
    CharState,
    graph_to_x,
    label_map,
    to_characteristic,
    window_labels,
    x_of_Y,
)
from src.core.grid_function import GridFunction, trapezoid_integral
from src.errors import XiPositivityError
from src.peakons.dynamics import PeakonState, peakon_profile


def test_zero_data_maps_to_identity(coarse_grid):
    s = to_characteristic(coarse_grid)
    np.testing.assert_allclose(s.x, s.Y, atol=1e-12)
    assert np.all(s.alpha == 0)
    assert np.all(s.u == 0)
    assert np.all(s.xi == 1)


def test_unit_slope_segment():
    def ramp(x):
        return np.where(np.abs(x) < 2, x, 2 * np.sign(x) * np.exp(-(np.abs(x) - 2)))

    u0 = GridFunction.on_interval(10.0, 2048, ramp)
    x, labels = label_map(u0)
    inner = np.abs(x[:-1]) < 1.5
    np.testing.assert_allclose(np.diff(labels)[inner] / u0.dx, 4.0, rtol=1e-9)
    s = to_characteristic(u0)
    middle = np.abs(s.x) < 1.0
    np.testing.assert_allclose(s.alpha[middle], np.pi / 2, atol=1e-6)


def test_round_trip_reproduces_gaussian(fine_bump):
    s = to_characteristic(fine_bump)
    assert np.all(s.xi == 1.0)
    back = graph_to_x(s, fine_bump)
    assert np.max(np.abs(back.values - fine_bump.values)) <= 1e-6


def test_label_measure_matches_density(fine_bump):
    Y1, Y2 = window_labels(fine_bump, [-1.0, 0.5])
    ux = fine_bump.derivative().values
    inside = (fine_bump.x >= -1.0) & (fine_bump.x <= 0.5)
    density = fine_bump.like(np.where(inside, (1 + ux ** 2) ** 2, 0.0))
    assert Y2 - Y1 == pytest.approx(trapezoid_integral(density), rel=2e-2)


def test_labels_vanish_at_origin(bump):
    assert window_labels(bump, [0.0])[0] == pytest.approx(0.0, abs=1e-12)


def test_peakon_profile_enters_without_smearing(grid, peakon_pair):
    u0 = grid.like(peakon_profile(peakon_pair)(grid.x)[0])
    s = to_characteristic(u0, peakon_profile(peakon_pair))
    # the slope right of the positive peak is -p1 + p2 e^{-1}
    Y1, Y2 = window_labels(u0, [-0.5, 0.5], peakon_profile(peakon_pair))
    assert Y1 < Y2
    assert np.min(s.alpha) < -np.pi / 3
    assert np.max(np.abs(s.alpha)) < np.pi


def test_x_of_Y_identity_for_flat_state():
    s = CharState.zeros(10.0, 257)
    np.testing.assert_allclose(x_of_Y(s), s.Y, atol=1e-12)


def test_x_of_Y_collapses_where_alpha_is_pi():
    s = CharState.zeros(10.0, 257)
    alpha = np.zeros(s.n)
    alpha[100:150] = np.pi
    x = x_of_Y(s.replace(alpha=alpha))
    assert np.ptp(x[100:150]) < 1e-12
    assert np.all(np.diff(x) >= 0)


def test_graph_of_zero_state(coarse_grid):
    s = CharState.zeros(20.0, 512)
    assert np.all(graph_to_x(s, coarse_grid).values == 0)


def test_graph_uses_single_value_on_collapsed_interval(coarse_grid):
    s = CharState.zeros(20.0, 1024)
    alpha = np.zeros(s.n)
    alpha[500:540] = np.pi
    x = x_of_Y(s.replace(alpha=alpha))
    u = np.exp(-x ** 2)
    back = graph_to_x(s.replace(x=x, u=u, alpha=alpha), coarse_grid)
    assert np.all(np.isfinite(back.values))
    np.testing.assert_allclose(back.values, np.exp(-coarse_grid.x ** 2), atol=2e-3)


def test_state_validation():
    s = CharState.zeros(5.0, 16)
    with pytest.raises(XiPositivityError, match="xi-positivity violated"):
        s.replace(xi=np.zeros(16))
    with pytest.raises(ValueError):
        s.replace(u=np.zeros(4))


def test_state_serialization(tmp_path, bump):
    s = to_characteristic(bump)
    header = s.to_csv(tmp_path / "s.csv").read_text().splitlines()[0]
    assert header == "Y,x,u,alpha,xi"
    restored = CharState.from_dict(s.to_dict())
    np.testing.assert_array_equal(restored.alpha, s.alpha)


def test_peak_tips_become_node_pairs(grid, peakon_pair):
    profile = peakon_profile(peakon_pair)
    s = to_characteristic(grid, profile)
    assert s.n == grid.n
    assert len(s.breaks) == 2
    Y = s.Y
    tips = window_labels(grid, peakon_pair.q, profile)
    for k, q, tip in zip(s.breaks, peakon_pair.q, tips):
        assert Y[k] == Y[k - 1]
        assert Y[k] == pytest.approx(tip, abs=1e-9)
        assert s.x[k] == s.x[k - 1] == q
    steps = np.diff(Y)
    np.testing.assert_allclose(steps[steps > 0], s.dY, rtol=1e-9)
    # one-sided slopes at the positive peak: 1 - p2/e on the left, -1 - p2/e on the right
    left, right = s.breaks[0] - 1, s.breaks[0]
    slopes = np.tan(s.alpha[[left, right]] / 2)
    np.testing.assert_allclose(slopes, [1 - 0.5 * np.exp(-1), -1 - 0.5 * np.exp(-1)], rtol=1e-12)


def test_nodes_carry_their_own_labels(grid, peakon_pair):
    profile = peakon_profile(peakon_pair)
    s = to_characteristic(grid, profile)
    np.testing.assert_allclose(window_labels(grid, s.x, profile), s.Y, atol=1e-10)


def test_window_label_gap_is_the_density_integral(grid, peakon_pair):
    profile = peakon_profile(peakon_pair)
    Y1, Y2 = window_labels(grid, [-0.5, 0.5], profile)
    expected, _ = quad(lambda z: (1 + profile(z)[1] ** 2) ** 2, -0.5, 0.5, epsabs=1e-13, epsrel=1e-13)
    assert Y2 - Y1 == pytest.approx(expected, rel=1e-10)


def test_unaligned_kinks_are_reported(caplog, grid):
    profile = peakon_profile(PeakonState(0.0, [1.0, 1.0, 1.0], [-1.0, 0.3, 2.0]))
    with caplog.at_level(logging.WARNING, logger="src.characteristic.transform"):
        s = to_characteristic(grid, profile)
    assert "fall between label nodes" in caplog.text
    assert len(s.breaks) == 2
    assert s.x[s.breaks[0]] == -1.0
    assert s.x[s.breaks[1]] == 2.0


def test_breaks_are_validated():
    s = CharState.zeros(5.0, 16)
    with pytest.raises(ValueError, match="breaks"):
        s.replace(breaks=(0,))
    with pytest.raises(ValueError, match="breaks"):
        s.replace(breaks=(3, 4))


def test_breaks_survive_serialization(coarse_grid, peakon_pair):
    s = to_characteristic(coarse_grid, peakon_profile(peakon_pair))
    restored = CharState.from_dict(json.loads(s.to_json()))
    assert restored.breaks == s.breaks
    np.testing.assert_array_equal(restored.Y, s.Y)
