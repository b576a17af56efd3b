"""Tests for the exact Lipschitz bounds and their random-matrix estimates.
"""

import math
import numpy as np
from numpy.testing import assert_allclose
import pytest
from lipscope.bounds import (
    BOUND_REPORT_CODEC, bai_yin_error, bound_report, exact_lower_bound, exact_upper_bound,
    gaussian_extreme_estimates, loglinear_depth_slope, lower_growth_threshold,
    product_matrix_sigma, product_matrix_sigma_closed, rmt_lower_bound, rmt_upper_bound,
    upper_growth_threshold
)
from lipscope.errors import InputError
from lipscope.network import Architecture, Network, forward, identity_network, sample_network
from lipscope.rng import derive_substream, gaussian_matrix, stream_new

def _diagonal_net(*scales):
    arch = Architecture((2,) * (len(scales) + 1), 'identity')
    return Network(arch, tuple(np.diag([s, s]) for s in scales),
        tuple(np.zeros(2) for _ in scales))

def test_exact_bounds_closed_forms():
    identity = identity_network(4, 3)
    assert exact_upper_bound(identity) == pytest.approx(1.0, rel = 1e-12)
    assert exact_lower_bound(identity) == pytest.approx(1.0, rel = 1e-12)

    diagonal = _diagonal_net(2.0, 3.0)
    assert exact_upper_bound(diagonal) == pytest.approx(6.0, rel = 1e-12)
    assert exact_lower_bound(diagonal) == pytest.approx(6.0, rel = 1e-12)

def test_exact_upper_bounds_the_measured_stretch():
    first = np.array([[2.0, -1.0], [-1.0, 2.0]])
    net = Network(Architecture((2, 2, 2), 'identity'), (first, np.eye(2)),
        (np.zeros(2), np.zeros(2)))
    x = np.array([1.0, -1.0])
    quotient = np.linalg.norm(forward(net, x) - forward(net, np.zeros(2))) / np.linalg.norm(x)
    assert quotient == pytest.approx(3.0)
    assert exact_upper_bound(net) == pytest.approx(3.0, rel = 1e-12)
    assert exact_lower_bound(net) == pytest.approx(3.0, rel = 1e-12)

def test_exact_lower_never_exceeds_upper():
    stream = stream_new(10)
    for index in range(500):
        depth = 1 + index % 4
        widths = tuple(int(w) for w in 1 + (stream.uniforms(depth + 1) * 12).astype(int))
        net = sample_network(Architecture(widths), 1.0, 0.0, derive_substream(10, index))
        assert exact_lower_bound(net) <= exact_upper_bound(net) + 1e-9

def test_exact_upper_tracks_rmt_upper():
    arch = Architecture.constant_width(300, 1)
    mean = np.mean([exact_upper_bound(sample_network(arch, 1.0, 0.0, derive_substream(0, index)))
        for index in range(20)])
    assert mean == pytest.approx(rmt_upper_bound(arch, 1.0), rel = 0.2)

def _upper_ratio(arch, master):
    mean = np.mean([exact_upper_bound(sample_network(arch, 1.0, 0.0,
        derive_substream(master, index))) for index in range(20)])
    return mean / rmt_upper_bound(arch, 1.0)

@pytest.mark.slow
def test_upper_ratio_approaches_one_with_width():
    ratios = [_upper_ratio(Architecture.constant_width(width, 3), 2) for width in (10, 50, 300)]
    assert ratios[0] < ratios[1] < ratios[2] <= 1.0
    assert ratios[2] >= 0.8

@pytest.mark.slow
def test_upper_ratio_stays_below_one_with_depth():
    for depth in range(1, 9):
        assert _upper_ratio(Architecture.constant_width(50, depth), 3) <= 1.0

def test_exact_lower_tracks_rmt_lower():
    arch = Architecture((2, 100, 100, 2))
    mean = np.mean([exact_lower_bound(sample_network(arch, 1.0, 0.0, derive_substream(1, index)))
        for index in range(50)])
    ratio = mean / rmt_lower_bound(arch, 1.0)
    assert 0.5 <= ratio <= 2.0

def test_rmt_upper_bound():
    assert rmt_upper_bound(Architecture((4, 4, 4, 4)), 1.0) == pytest.approx(64.0)
    assert rmt_upper_bound(Architecture((2, 300, 2)), 1.0) == \
        pytest.approx((math.sqrt(300) + math.sqrt(2)) ** 2)
    assert rmt_upper_bound(Architecture((2, 300, 2)), 1.0) == pytest.approx(350.99, abs = 0.01)

    arch = Architecture((3, 7, 5, 2))
    assert rmt_upper_bound(arch, 2.0) == pytest.approx(2.0 ** arch.depth * rmt_upper_bound(arch, 1.0))
    with pytest.raises(InputError):
        rmt_upper_bound(arch, 0.0)

def test_rmt_lower_bound():
    assert rmt_lower_bound(Architecture((4, 4, 4, 4)), 1.0) == pytest.approx(16.0)
    assert rmt_lower_bound(Architecture((2, 300, 2)), 1.0) == pytest.approx(48.99, abs = 0.01)
    assert rmt_lower_bound(Architecture((2, 300, 2)), 1.0, correction = 1.0) == \
        pytest.approx(math.sqrt(300) * 3.0 * math.sqrt(2))
    with pytest.raises(InputError):
        rmt_lower_bound(Architecture((2, 2)), 1.0, correction = -0.5)

def test_rmt_lower_below_rmt_upper():
    for width in (1, 5, 50, 300):
        for depth in range(0, 6):
            arch = Architecture.constant_width(width, depth)
            for sigma in (0.05, 0.5, 1.0, 3.0):
                assert rmt_lower_bound(arch, sigma) <= rmt_upper_bound(arch, sigma)

def test_product_matrix_sigma():
    assert product_matrix_sigma((5, 9), 1.7) == 1.7
    assert product_matrix_sigma((3, 9, 3), 2.0) == pytest.approx(12.0)
    stream = stream_new(12)
    for length in range(2, 13):
        widths = [int(w) for w in 1 + (stream.uniforms(length) * 40).astype(int)]
        assert product_matrix_sigma(widths, 0.8) == \
            pytest.approx(product_matrix_sigma_closed(widths, 0.8), rel = 1e-12)
    with pytest.raises(InputError):
        product_matrix_sigma([4], 1.0)

def test_product_matrix_sigma_empirical():
    stds = []
    for index in range(20):
        stream = derive_substream(5, index)
        first, second = gaussian_matrix(stream, 50, 50, 1.0), gaussian_matrix(stream, 50, 50, 1.0)
        stds.append(np.std(second @ first))
    assert np.mean(stds) == pytest.approx(product_matrix_sigma((50, 50, 50), 1.0), rel = 0.05)

def test_gaussian_extreme_estimates():
    low, high = gaussian_extreme_estimates(9, 9, 1.0)
    assert low == 0.0
    assert high == pytest.approx(6.0)
    assert_allclose(gaussian_extreme_estimates(200, 100, 1.0), (4.142, 24.142), atol = 1e-3)
    assert_allclose(gaussian_extreme_estimates(200, 100, 3.0), (3 * 4.1421356, 3 * 24.1421356))
    with pytest.raises(InputError):
        gaussian_extreme_estimates(100, 200, 1.0)

def test_extreme_singular_values_in_expectation():
    low, high = gaussian_extreme_estimates(200, 100, 1.0)
    singular = np.array([np.linalg.svd(gaussian_matrix(derive_substream(6, index), 200, 100, 1.0),
        compute_uv = False)[[0, -1]] for index in range(40)])
    assert low < singular[:, 1].mean()
    assert 0.95 * high < singular[:, 0].mean() < high

def test_growth_thresholds():
    width = 20
    assert upper_growth_threshold(width) == pytest.approx(0.1118, abs = 1e-4)
    assert lower_growth_threshold(width) == pytest.approx(0.2236, abs = 1e-4)

    def grows(bound, sigma):
        values = [bound(Architecture.constant_width(width, depth), sigma) for depth in range(1, 6)]
        return all(b > a for a, b in zip(values, values[1:]))

    def shrinks(bound, sigma):
        values = [bound(Architecture.constant_width(width, depth), sigma) for depth in range(1, 6)]
        return all(b < a for a, b in zip(values, values[1:]))

    assert grows(rmt_upper_bound, 0.3)
    assert shrinks(rmt_upper_bound, 0.05)
    assert grows(rmt_lower_bound, 0.3)
    assert shrinks(rmt_lower_bound, 0.2)

def test_log_upper_bound_is_affine_in_depth():
    for width in (10, 50, 100):
        logs = [math.log(rmt_upper_bound(Architecture.constant_width(width, depth), 1.0))
            for depth in range(1, 16)]
        assert_allclose(np.diff(logs), loglinear_depth_slope(width, 1.0), rtol = 1e-12)

def test_bounds_increase_with_width():
    for depth in (1, 3, 8):
        uppers = [rmt_upper_bound(Architecture.constant_width(w, depth), 1.0) for w in range(10, 101, 10)]
        lowers = [rmt_lower_bound(Architecture.constant_width(w, depth), 1.0) for w in range(10, 101, 10)]
        assert np.all(np.diff(uppers) > 0.0)
        assert np.all(np.diff(lowers) > 0.0)

def test_deeper_is_larger_along_neuron_budget():
    cells = [(60, 1), (30, 2), (20, 3), (15, 4), (12, 5), (10, 6)]
    uppers = [rmt_upper_bound(Architecture.constant_width(w, d), 1.0) for w, d in cells]
    assert np.all(np.diff(uppers) > 0.0)

def test_bai_yin_error():
    assert bai_yin_error(64, 2, 1.0) == pytest.approx(math.sqrt(2))
    assert bai_yin_error(1, 64, 0.5) == pytest.approx(0.5)

def test_bound_report(small_relu_net):
    report = bound_report(identity_network(3, 2))
    assert report.exact_upper == pytest.approx(1.0)
    assert report.exact_lower == pytest.approx(1.0)
    assert report.rmt_upper == pytest.approx((2 * math.sqrt(3)) ** 2)
    assert report.widths == (3, 3, 3)

    report = bound_report(small_relu_net)
    assert report == bound_report(small_relu_net)
    assert report.exact_lower <= report.exact_upper + 1e-9
    assert report.rmt_lower <= report.rmt_upper
    assert BOUND_REPORT_CODEC.loads(BOUND_REPORT_CODEC.dumps(report)) == report
