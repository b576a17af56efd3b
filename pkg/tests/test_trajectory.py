"""Tests for trajectory lengths and their correlation with the Lipschitz estimates.
"""

import math
import numpy as np
from numpy.testing import assert_array_equal
import pytest
from lipscope.bounds import exact_lower_bound, exact_upper_bound
from lipscope.errors import InputError, DimensionError
from lipscope.network import Architecture, identity_network, sample_network, stack_product
from lipscope.rng import derive_substream, stream_new
from lipscope.trajectory import (
    Trajectory, circle_trajectory, expressiveness_correlation, line_trajectory, loglog_fit,
    output_trajectory_length, polyline_length, rmt_trajectory_lower, stretch_ratio
)

def test_circle_length():
    circle = circle_trajectory(2, 1.0, 4096)
    assert circle.closed
    assert circle.length == pytest.approx(2 * math.pi, rel = 1e-5)
    assert circle_trajectory(2, 2.0, 4096).length == pytest.approx(2 * circle.length, rel = 1e-12)

def test_circle_in_higher_dimensions():
    circle = circle_trajectory(5, 1.0, 64)
    assert circle.dim == 5
    assert_array_equal(circle.points[:, 2:], 0.0)

@pytest.mark.parametrize('args', [(1, 1.0, 64), (2, 0.0, 64), (2, 1.0, 4)])
def test_circle_rejects_bad_arguments(args):
    with pytest.raises(InputError):
        circle_trajectory(*args)

def test_polyline_length():
    assert polyline_length([(0.0, 0.0), (3.0, 4.0)]) == 5.0
    assert polyline_length([(0.0, 0.0), (3.0, 4.0)], closed = True) == 10.0
    with pytest.raises(InputError):
        polyline_length([(1.0, 1.0)])

def test_polyline_length_grows_under_refinement():
    lengths = [circle_trajectory(2, 1.0, points).length for points in (8, 16, 64, 512, 4096)]
    assert all(later >= earlier - 1e-12 for earlier, later in zip(lengths, lengths[1:]))

def test_trajectory_validation():
    with pytest.raises(InputError):
        Trajectory(np.array([[0.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(InputError):
        Trajectory(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(InputError):
        Trajectory(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]), closed = True)
    open_path = Trajectory(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]))
    assert open_path.length == pytest.approx(2 * np.sqrt(2))

def test_line_trajectory():
    line = line_trajectory([0.0, 0.0, 0.0], [1.0, 2.0, 2.0], 100)
    assert not line.closed
    assert line.length == pytest.approx(3.0, rel = 1e-12)
    with pytest.raises(DimensionError):
        line_trajectory([0.0, 0.0], [1.0, 2.0, 2.0])

def test_linear_scaling_of_output_length():
    circle = circle_trajectory(2, 1.0, 1024)
    net = identity_network(2, 3, scale = 1.5)
    assert output_trajectory_length(net, circle) == pytest.approx(1.5 ** 3 * circle.length, rel = 1e-9)

def test_output_length_rejects_wrong_dimension(small_relu_net):
    with pytest.raises(DimensionError):
        output_trajectory_length(small_relu_net, circle_trajectory(3, 1.0, 64))

def test_stretch_never_exceeds_upper_bound():
    circle = circle_trajectory(2, 1.0, 512)
    for index in range(100):
        width, depth = 5 + 3 * (index % 5), 1 + index % 4
        net = sample_network(Architecture.constant_width(width, depth), 1.0, 0.0,
            derive_substream(21, index))
        assert stretch_ratio(net, circle) <= exact_upper_bound(net) + 1e-9

def test_discretization_converges():
    net = sample_network(Architecture((2, 50, 50, 2)), 1.0, 0.0, stream_new(13))
    coarse = output_trajectory_length(net, circle_trajectory(2, 1.0, 8192))
    fine = output_trajectory_length(net, circle_trajectory(2, 1.0, 16384))
    assert coarse == pytest.approx(fine, rel = 5e-3)

def test_relu_networks_are_positively_homogeneous():
    net = sample_network(Architecture((2, 20, 20, 2)), 1.0, 0.0, stream_new(14))
    small, large = circle_trajectory(2, 1.0, 512), circle_trajectory(2, 3.0, 512)
    assert output_trajectory_length(net, large) == \
        pytest.approx(3.0 * output_trajectory_length(net, small), rel = 1e-10)

def test_linear_network_attains_the_lower_bound():
    net = sample_network(Architecture((3, 8, 6, 3), 'identity'), 1.0, 0.0, stream_new(15))
    top = np.linalg.svd(stack_product(net.weights))[2][0]
    ratio = stretch_ratio(net, line_trajectory(-top, top, 64))
    lower = exact_lower_bound(net)
    assert 0.99 * lower <= ratio <= lower + 1e-9

def test_rmt_trajectory_lower():
    assert rmt_trajectory_lower(3, 0, 1.0) == pytest.approx(1.5)
    assert rmt_trajectory_lower(7, 4, 2.0) == pytest.approx(2.0 ** 5 * rmt_trajectory_lower(7, 4, 1.0))
    n, depth = 10 ** 4, 5
    ratio = rmt_trajectory_lower(n, depth, 1.0) / (n ** (depth / 2) * math.sqrt(n))
    assert ratio == pytest.approx(1.0, rel = 0.1)
    with pytest.raises(InputError):
        rmt_trajectory_lower(0, 1, 1.0)
    with pytest.raises(InputError):
        rmt_trajectory_lower(3, 1, -1.0)

def test_single_cell_correlation():
    rows = expressiveness_correlation([30], [3], 1.0, 0, circle_trajectory(2, 1.0, 256))
    assert len(rows) == 1
    assert (rows[0].width, rows[0].depth) == (30, 3)
    assert rows[0].stretch_ratio <= rows[0].exact_upper + 1e-9

def test_correlation_is_deterministic_and_thread_independent():
    circle = circle_trajectory(2, 1.0, 256)
    serial = expressiveness_correlation([10, 20], [1, 2, 3], 1.0, 4, circle)
    parallel = expressiveness_correlation([10, 20], [1, 2, 3], 1.0, 4, circle, threads = 3)
    assert serial == parallel
    assert [(row.width, row.depth) for row in serial] == \
        [(10, 1), (10, 2), (10, 3), (20, 1), (20, 2), (20, 3)]

def test_correlation_rejects_empty_ranges():
    with pytest.raises(InputError):
        expressiveness_correlation([], [3], 1.0, 0, circle_trajectory())

def test_loglog_fit():
    x = np.array([1.0, 2.0, 4.0, 10.0])
    fit = loglog_fit(x, 3.0 * x ** 2)
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.correlation == pytest.approx(1.0)
    with pytest.raises(InputError):
        loglog_fit([1.0, -1.0], [1.0, 1.0])

@pytest.mark.slow
def test_stretch_follows_the_lower_estimate():
    rows = expressiveness_correlation(range(30, 101, 10), range(3, 9), 1.0, 0,
        circle_trajectory(2, 1.0, 2048))
    fit = loglog_fit([row.rmt_lower for row in rows], [row.stretch_ratio for row in rows])
    assert 0.5 <= fit.slope <= 2.0
    assert fit.correlation >= 0.9
    assert all(row.stretch_ratio <= row.exact_upper + 1e-9 for row in rows)
