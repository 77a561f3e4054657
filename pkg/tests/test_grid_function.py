import numpy as np
import pytest

from src.core.grid_function import (
    GridFunction,
    decay_weights,
    derivative,
    sample_linear,
    trapezoid_integral,
)
from src.errors import NonFiniteInputError


def test_zero_function_integrates_to_zero(grid):
    assert trapezoid_integral(grid) == 0.0


def test_two_sided_exponential_integral(grid):
    f = grid.like(np.exp(-2 * np.abs(grid.x)))
    assert trapezoid_integral(f) == pytest.approx(1.0, abs=1e-4)


def test_odd_function_integrates_to_zero(grid):
    assert trapezoid_integral(grid.like(grid.x)) == pytest.approx(0.0, abs=1e-10)


def test_rejects_non_finite_samples():
    values = np.zeros(16)
    values[3] = np.nan
    with pytest.raises(NonFiniteInputError, match="non-finite input"):
        GridFunction(x0=0.0, dx=0.1, values=values)


@pytest.mark.parametrize("dx, n", [(0.0, 16), (-0.1, 16), (0.1, 4)])
def test_rejects_bad_grids(dx, n):
    with pytest.raises(ValueError):
        GridFunction(x0=0.0, dx=dx, values=np.zeros(n))


def test_sample_linear_at_node_midpoint_and_outside(coarse_grid):
    f = coarse_grid.like(coarse_grid.x)
    node = coarse_grid.x[100]
    assert sample_linear(f, node) == f.values[100]
    assert sample_linear(f, node + coarse_grid.dx / 2) == pytest.approx(node + coarse_grid.dx / 2, abs=1e-12)
    assert sample_linear(f, coarse_grid.x_end + 1.0) == 0.0
    assert sample_linear(f, coarse_grid.x0 - 1.0) == 0.0


def test_derivative_is_second_order(coarse_grid):
    errors = []
    for n in (512, 1024):
        g = GridFunction.on_interval(5.0, n, np.sin)
        errors.append(np.max(np.abs(derivative(g.values, g.dx) - np.cos(g.x))))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.2)


def test_decay_weights_integrate_the_weight_exactly(grid):
    W = decay_weights(grid)
    assert W.sum() == pytest.approx(2 * (1 - np.exp(-20.0)), rel=1e-12)
    assert np.all(W >= 0)


def test_decay_weights_exact_for_piecewise_linear_data():
    # 0 is a node, so |x| is piecewise linear on this grid
    g = GridFunction.on_interval(20.0, 1025, np.abs)
    expected = 2 * (1 - 21 * np.exp(-20.0))
    assert decay_weights(g) @ g.values == pytest.approx(expected, rel=1e-10)


def test_csv_and_json_serialization(tmp_path, bump):
    path = bump.to_csv(tmp_path / "u.csv")
    assert path.read_text().splitlines()[0] == "x,value"
    restored = GridFunction.from_csv(path)
    np.testing.assert_array_equal(restored.values, bump.values)
    assert restored.x0 == bump.x0
    assert GridFunction.from_dict(bump.to_dict()).dx == bump.dx
