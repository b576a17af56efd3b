"""Tests for the SplitMix64 streams and the Gaussian sampler.
"""

import numpy as np
from numpy.testing import assert_array_equal
import pytest
from lipscope.errors import InputError
from lipscope.linalg import spectral_norm
from lipscope.rng import RngStream, derive_substream, gaussian_matrix, mix64, stream_new

GOLDEN_SEED_0 = [0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4, 0x06c45d188009454f, 0xf88bb8a8724c81ec]
GOLDEN_SEED_42 = [0xbdd732262feb6e95, 0x28efe333b266f103, 0x47526757130f9f52, 0x581ce1ff0e4ae394]

@pytest.mark.parametrize('seed,expected', [(0, GOLDEN_SEED_0), (42, GOLDEN_SEED_42)])
def test_golden_outputs(seed, expected):
    stream = stream_new(seed)
    assert [stream.next_u64() for _ in range(4)] == expected

def test_golden_uniforms():
    stream = stream_new(42)
    expected = [(value >> 11) * 2.0 ** -53 for value in GOLDEN_SEED_42]
    assert [stream.next_uniform() for _ in range(4)] == expected

def test_uniform_block_matches_scalar_draws():
    block = stream_new(3).uniforms(257)
    stream = stream_new(3)
    assert_array_equal(block, [stream.next_uniform() for _ in range(257)])
    assert np.all((block >= 0.0) & (block < 1.0))

def test_streams_are_deterministic_and_distinct():
    assert_array_equal(stream_new(0).uniforms(1000), stream_new(0).uniforms(1000))
    assert np.any(stream_new(0).uniforms(1000) != stream_new(1).uniforms(1000))

def test_seed_is_reduced_modulo_two_to_the_64():
    assert stream_new(2 ** 64 + 5).next_u64() == stream_new(5).next_u64()

def test_derive_substream_golden():
    expected = {
        0: (0x12ae30237b17df14, 0x863b891f4c0abd4f),
        1: (0x8b2faab3724ac25b, 0xb382824d9bf81fb8),
        2: (0xcaf1d8908106b723, 0x6ca49a049b8389e1)
    }
    for index, (origin, first) in expected.items():
        stream = derive_substream(7, index)
        assert stream.origin_seed == origin
        assert stream.next_u64() == first

def test_derive_substream_is_pure():
    assert derive_substream(7, 0).next_u64() == derive_substream(7, 0).next_u64()
    assert derive_substream(7, 0).next_u64() != derive_substream(7, 1).next_u64()
    firsts = {derive_substream(7, index).next_u64() for index in range(50)}
    assert len(firsts) == 50

def test_mix64_of_zero():
    assert mix64(0) == 0

def test_normal_block_matches_scalar_draws():
    block_stream, scalar_stream = stream_new(11), stream_new(11)
    block = block_stream.standard_normals(7)
    scalars = [scalar_stream.next_standard_normal() for _ in range(7)]
    assert_array_equal(block, scalars)
    assert block_stream.counter == scalar_stream.counter
    # The cached variate is shared by both ways of drawing
    assert block_stream.next_standard_normal() == scalar_stream.next_standard_normal()

def test_normal_statistics():
    draws = stream_new(42).standard_normals(1_000_000)
    assert abs(draws.mean()) < 5e-3
    assert abs(draws.var() - 1.0) < 1.5e-2
    assert abs(np.mean(np.abs(draws) <= 1.96) - 0.95) < 2e-3

def test_gaussian_matrix_scales_with_sigma():
    scaled = gaussian_matrix(stream_new(5), 4, 3, 2.5)
    unit = gaussian_matrix(stream_new(5), 4, 3, 1.0)
    assert scaled.shape == (4, 3)
    assert_array_equal(scaled, 2.5 * unit)

def test_gaussian_matrix_fills_row_major():
    matrix = gaussian_matrix(stream_new(9), 3, 4, 1.0)
    assert_array_equal(matrix.ravel(), stream_new(9).standard_normals(12))

def test_gaussian_matrix_variance():
    matrix = gaussian_matrix(stream_new(1), 1000, 1000, 1.0)
    assert abs(matrix.var() - 1.0) < 1e-2

def test_gaussian_matrix_spectral_norm():
    matrix = gaussian_matrix(stream_new(2), 200, 100, 1.0)
    assert spectral_norm(matrix) == pytest.approx(np.sqrt(200) + np.sqrt(100), rel = 0.15)

def test_gaussian_matrix_rejects_bad_arguments():
    with pytest.raises(InputError):
        gaussian_matrix(stream_new(0), 2, 2, 0.0)
    with pytest.raises(InputError):
        gaussian_matrix(stream_new(0), 0, 2, 1.0)

def test_permutation():
    order = RngStream(4).permutation(100)
    assert sorted(order.tolist()) == list(range(100))
    assert_array_equal(order, RngStream(4).permutation(100))
