"""Spectral transforms and the pulse-shaping filter for stream assembly.

The DFT here is deliberately self-contained: an iterative radix-2
Cooley-Tukey with bit-reversal permutation for power-of-two lengths and a
direct O(N^2) evaluation otherwise. Nothing in the package imports an FFT
from elsewhere; tests check this implementation against a naive transform.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@functools.lru_cache(maxsize=32)
def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for bit in range(bits):
        rev |= ((idx >> bit) & 1) << (bits - 1 - bit)
    return rev


def _fft_pow2(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT over the last axis."""
    n = x.shape[-1]
    out = np.ascontiguousarray(x, dtype=np.complex128)[..., _bit_reverse_indices(n)]
    span = 2
    while span <= n:
        half = span // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / span)
        blocks = out.reshape(*out.shape[:-1], n // span, span)
        odd = blocks[..., half:] * twiddle
        even = blocks[..., :half]
        low = even + odd
        high = even - odd
        blocks[..., :half] = low
        blocks[..., half:] = high
        span *= 2
    return out


def _dft_direct(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    k = np.arange(n)
    basis = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return np.asarray(x, dtype=np.complex128) @ basis.T


def dft(x: np.ndarray) -> np.ndarray:
    """Discrete Fourier transform over the last axis (any length >= 1).

    Power-of-two lengths take the radix-2 fast path; other lengths fall back
    to the direct transform. Output is complex128 with numpy conventions
    (bin k holds ``sum_n x[n] exp(-2j pi k n / N)``, no scaling).
    """
    x = np.asarray(x)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise ValueError("dft needs a non-empty array")
    if x.shape[-1] == 1:
        return np.asarray(x, dtype=np.complex128).copy()
    if _is_pow2(x.shape[-1]):
        return _fft_pow2(x)
    return _dft_direct(x)


def idft(x: np.ndarray) -> np.ndarray:
    """Inverse DFT over the last axis (1/N convention), any length >= 1."""
    x = np.asarray(x)
    return np.conj(dft(np.conj(x))) / x.shape[-1]


@dataclass(frozen=True)
class RaisedCosineSpec:
    """A pulse-shaping kernel: odd length, rolloff in (0, 1], unit DC gain."""

    length: int
    rolloff: float
    taps: np.ndarray = field(repr=False)


def raised_cosine_value(tau, length: int, rolloff: float):
    """Evaluate the raised-cosine kernel on its continuous argument.

    Flat at 1 for ``|tau| <= (1-rolloff)/(2*length)``, cosine rolloff out to
    ``(1+rolloff)/(2*length)``, zero beyond. Accepts scalars or arrays.
    """
    tau = np.asarray(tau, dtype=np.float64)
    a = np.abs(tau)
    flat_edge = (1.0 - rolloff) / (2.0 * length)
    outer_edge = (1.0 + rolloff) / (2.0 * length)
    rolled = 0.5 * (1.0 + np.cos(np.pi * length / rolloff * (a - flat_edge)))
    out = np.where(a <= flat_edge, 1.0, np.where(a <= outer_edge, rolled, 0.0))
    return float(out) if out.ndim == 0 else out


def raised_cosine_taps(length: int, rolloff: float) -> RaisedCosineSpec:
    """Sample the kernel on a symmetric grid and normalize to unit DC gain.

    The grid is ``tau_j = (j - (length-1)/2) * (1+rolloff) / (length*(length-1))``,
    which spans exactly the kernel support, so the endpoint taps are zero and
    the center tap is the maximum.
    """
    if length < 3 or length % 2 == 0:
        raise ValueError(f"length must be odd and >= 3, got {length}")
    if not 0.0 < rolloff <= 1.0:
        raise ValueError(f"rolloff must be in (0, 1], got {rolloff}")
    offsets = np.arange(length) - (length - 1) // 2
    tau = offsets * ((1.0 + rolloff) / (length * (length - 1)))
    taps = raised_cosine_value(tau, length, rolloff)
    taps = taps / taps.sum()
    return RaisedCosineSpec(length=length, rolloff=float(rolloff), taps=taps)


def circular_convolve(signal: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Circular convolution over the last axis, taps zero-extended to match.

    Uses the DFT product for power-of-two lengths and the direct modular sum
    otherwise. Output is complex128 and has the signal's shape.
    """
    signal = np.asarray(signal, dtype=np.complex128)
    taps = np.asarray(taps)
    n = signal.shape[-1]
    if taps.ndim != 1 or taps.size == 0:
        raise ValueError("taps must be a non-empty 1-D array")
    if taps.size > n:
        raise ValueError(f"taps ({taps.size}) longer than signal ({n})")
    if _is_pow2(n):
        h = np.zeros(n, dtype=np.complex128)
        h[: taps.size] = taps
        return idft(dft(signal) * dft(h))
    out = np.zeros_like(signal)
    for m in range(taps.size):
        out += taps[m] * np.roll(signal, m, axis=-1)
    return out


def overlap_save_reconstruct(packets: np.ndarray, spec: RaisedCosineSpec) -> np.ndarray:
    """Stitch generated packets into one pulse-shaped stream.

    The packets are concatenated in row order and filtered with ``spec.taps``
    by the overlap-save method: the stream is prefixed with ``length - 1``
    zeros, windows of ``packet_len`` samples advancing by
    ``packet_len - (length - 1)`` are circularly convolved with the
    zero-extended taps, and the first ``length - 1`` samples of each window
    (the circular wrap-around) are discarded. The result is compensated for
    the filter group delay ``(length - 1) / 2`` and truncated to the
    concatenated length, so it matches direct linear convolution of the
    stream with the same truncation.
    """
    packets = np.asarray(packets, dtype=np.complex128)
    if packets.ndim != 2 or packets.size == 0:
        raise ValueError("packets must be a non-empty 2-D array")
    n_fft = packets.shape[1]
    length = spec.length
    if length > n_fft:
        raise ValueError(f"filter length {length} exceeds packet length {n_fft}")
    stream = packets.reshape(-1)
    if length == 1:
        # No overlap to save: a one-tap filter is an exact scaling.
        return stream * spec.taps[0]

    n_out = stream.size
    delay = (length - 1) // 2
    hop = n_fft - (length - 1)
    n_blocks = -(-(n_out + delay) // hop)  # ceil
    pad_tail = (n_blocks - 1) * hop + n_fft - (length - 1) - stream.size
    padded = np.concatenate(
        [np.zeros(length - 1, dtype=np.complex128), stream, np.zeros(pad_tail, dtype=np.complex128)]
    )
    windows = np.lib.stride_tricks.sliding_window_view(padded, n_fft)[::hop][:n_blocks]
    filtered = circular_convolve(windows, spec.taps)
    linear = filtered[:, length - 1 :].reshape(-1)
    return linear[delay : delay + n_out]
