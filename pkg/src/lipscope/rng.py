"""A script containing the deterministic random number generation used
to sample network weights.

The generator is SplitMix64 read as a counter-based generator. With
`γ = 0x9E3779B97F4A7C15` and all arithmetic modulo 2⁶⁴, the k-th
output (k = 1, 2, ...) of a stream seeded with `s` is `mix(s + k·γ)`,
where

    z = (z ^ (z >> 30)) · 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) · 0x94D049BB133111EB
    mix(z) = z ^ (z >> 31)

A uniform draw is `(output >> 11) · 2⁻⁵³`, in [0, 1). Normal draws use
the polar Box–Muller method, both variates of each accepted pair being
used in order. Since every output depends only on the seed and its
position, blocks of draws are computed as numpy arrays while consuming
the stream exactly as repeated scalar calls would.

Substreams for Monte-Carlo trials are seeded with
`mix(master ^ (index · 0xD1B54A32D192ED03))`.
"""

import numpy as np
from numpy.typing import NDArray
from lipscope.errors import InputError

MASK: int = (1 << 64) - 1
"""Reduces Python integers modulo 2⁶⁴."""

GOLDEN_GAMMA: int = 0x9E3779B97F4A7C15
"""The SplitMix64 state increment."""

SUBSTREAM_MULTIPLIER: int = 0xD1B54A32D192ED03
"""The odd constant spreading substream indices before mixing."""

_MIX_1: np.uint64 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2: np.uint64 = np.uint64(0x94D049BB133111EB)
_UNIFORM_SCALE: float = 2.0 ** -53

_ACCEPT_RATE: float = np.pi / 4.0
"""Probability that a polar Box–Muller pair lands in the unit disc."""

def mix64(value: int) -> int:
    """Applies the SplitMix64 avalanche function to one 64-bit integer.

    Parameters
    ----------
    value : int
        The input, reduced modulo 2⁶⁴.

    Returns
    -------
    int
        The mixed value.
    """
    z: int = value & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)

def _mix64_array(values: NDArray[np.uint64]) -> NDArray[np.uint64]:
    """Applies the SplitMix64 avalanche function elementwise; uint64
    arithmetic wraps modulo 2⁶⁴."""
    z: NDArray[np.uint64] = values
    z = (z ^ (z >> np.uint64(30))) * _MIX_1
    z = (z ^ (z >> np.uint64(27))) * _MIX_2
    return z ^ (z >> np.uint64(31))

class RngStream:
    """A seedable stream of uniform and standard normal draws.

    A stream has a single owner; it must not be advanced from two threads
    at once, but it may be handed between threads.
    """

    def __init__(self, seed: int) -> None:
        """
        Parameters
        ----------
        seed : int
            The 64-bit seed of the stream.
        """
        self.origin_seed: int = seed & MASK
        self.counter: int = 0
        self._spare: float | None = None

    def __repr__(self) -> str:
        return f'RngStream(origin_seed={self.origin_seed:#018x}, counter={self.counter})'

    def _outputs(self, start: int, count: int) -> NDArray[np.uint64]:
        """Computes the raw outputs at positions start+1 .. start+count
        without advancing the stream."""
        steps: NDArray[np.uint64] = np.arange(start + 1, start + count + 1, dtype = np.uint64)
        states: NDArray[np.uint64] = np.uint64(self.origin_seed) \
            + steps * np.uint64(GOLDEN_GAMMA)
        return _mix64_array(states)

    def next_u64(self) -> int:
        """Draws the next raw 64-bit output.

        Returns
        -------
        int
            The output, in [0, 2⁶⁴).
        """
        self.counter += 1
        return mix64(self.origin_seed + self.counter * GOLDEN_GAMMA)

    def uniforms(self, count: int) -> NDArray[np.float64]:
        """Draws a block of uniforms in [0, 1).

        Parameters
        ----------
        count : int
            The number of draws.

        Returns
        -------
        ndarray
            The draws, in stream order.
        """
        block: NDArray[np.float64] = \
            (self._outputs(self.counter, count) >> np.uint64(11)).astype(np.float64) \
            * _UNIFORM_SCALE
        self.counter += count
        return block

    def next_uniform(self) -> float:
        """Draws the next uniform in [0, 1).

        Returns
        -------
        float
            The draw.
        """
        return float(self.uniforms(1)[0])

    def standard_normals(self, count: int) -> NDArray[np.float64]:
        """Draws a block of standard normal variates by the polar Box–Muller
        method, consuming the stream exactly as `count` scalar draws would.

        Parameters
        ----------
        count : int
            The number of draws.

        Returns
        -------
        ndarray
            The draws, in stream order.
        """
        out: NDArray[np.float64] = np.empty(count, dtype = np.float64)
        filled: int = 0
        if count > 0 and self._spare is not None:
            out[0], self._spare = self._spare, None
            filled = 1

        while filled < count:
            # Oversample pairs so one batch usually suffices
            needed_pairs: int = (count - filled + 1) // 2
            batch: int = int(needed_pairs / _ACCEPT_RATE) + 16

            raw: NDArray[np.float64] = \
                (self._outputs(self.counter, 2 * batch) >> np.uint64(11)).astype(np.float64) \
                * _UNIFORM_SCALE
            first: NDArray[np.float64] = 2.0 * raw[0::2] - 1.0
            second: NDArray[np.float64] = 2.0 * raw[1::2] - 1.0
            radius: NDArray[np.float64] = first * first + second * second
            # Reject pairs outside the open unit disc
            accepted: NDArray[np.intp] = np.flatnonzero((radius > 0.0) & (radius < 1.0))

            # Advance only past the last accepted pair in use
            if len(accepted) < needed_pairs:
                used: NDArray[np.intp] = accepted
                self.counter += 2 * batch
            else:
                used = accepted[:needed_pairs]
                self.counter += 2 * (int(used[-1]) + 1)

            factor: NDArray[np.float64] = np.sqrt(-2.0 * np.log(radius[used]) / radius[used])
            pairs: NDArray[np.float64] = np.column_stack(
                (first[used] * factor, second[used] * factor)).ravel()

            taken: int = min(len(pairs), count - filled)
            out[filled:filled + taken] = pairs[:taken]
            if taken < len(pairs):
                self._spare = float(pairs[taken])
            filled += taken

        return out

    def next_standard_normal(self) -> float:
        """Draws the next standard normal variate.

        Returns
        -------
        float
            The draw.
        """
        return float(self.standard_normals(1)[0])

    def permutation(self, size: int) -> NDArray[np.intp]:
        """Draws a uniformly random permutation of `range(size)`.

        Parameters
        ----------
        size : int
            The number of elements.

        Returns
        -------
        ndarray
            The permuted indices.
        """
        return np.argsort(self.uniforms(size), kind = 'stable')

def stream_new(seed: int) -> RngStream:
    """Creates a stream from a 64-bit seed.

    For seed 42 the first four raw outputs are 0xbdd732262feb6e95,
    0x28efe333b266f103, 0x47526757130f9f52, 0x581ce1ff0e4ae394.

    Parameters
    ----------
    seed : int
        The seed.

    Returns
    -------
    RngStream
        The new stream.
    """
    return RngStream(seed)

def derive_substream(master: int, index: int) -> RngStream:
    """Creates the stream of one Monte-Carlo trial. The stream depends
    only on the master seed and the trial index, never on the order in
    which trials run.

    Parameters
    ----------
    master : int
        The master seed of the experiment.
    index : int
        The trial index.

    Returns
    -------
    RngStream
        The trial stream.
    """
    return RngStream(mix64((master & MASK) ^ ((index * SUBSTREAM_MULTIPLIER) & MASK)))

def gaussian_matrix(stream: RngStream, rows: int, cols: int, sigma: float) -> np.ndarray:
    """Samples a matrix with independent N(0, σ²) entries, filled in
    row-major draw order.

    Parameters
    ----------
    stream : RngStream
        The stream to draw from.
    rows : int
        The number of rows.
    cols : int
        The number of columns.
    sigma : float
        The standard deviation of the entries.

    Returns
    -------
    Matrix
        The sampled matrix.
    """
    if not sigma > 0.0:
        raise InputError(f'sigma must be positive, got {sigma}')
    if rows < 1 or cols < 1:
        raise InputError(f'Matrix shape must be positive, got ({rows}, {cols})')
    return sigma * stream.standard_normals(rows * cols).reshape(rows, cols)
