"""
Continuous wavelet transform with the complex Morlet wavelet, returned as magnitudes.
"""
from typing import Union

import numpy as np
from scipy.signal import fftconvolve

from .constants import CWT_TRUNCATION, DEFAULT_MORLET_CENTER_FREQUENCY
from .exceptions import InvalidScale


def morlet(t: np.ndarray, omega0: float = DEFAULT_MORLET_CENTER_FREQUENCY) -> np.ndarray:
    """pi^(-1/4) exp(i omega0 t) exp(-t^2 / 2)"""
    t = np.asarray(t, dtype=np.float64)

    return np.pi ** -0.25 * np.exp(1j * omega0 * t) * np.exp(-0.5 * t ** 2)


def check_scales(scales) -> np.ndarray:
    scales = np.atleast_1d(np.asarray(scales, dtype=np.float64))

    if scales.ndim != 1 or len(scales) == 0:
        raise InvalidScale(f"scales must be a non-empty vector, got shape {scales.shape}")

    if not np.all(np.isfinite(scales)) or np.any(scales <= 0):
        raise InvalidScale(f"scales must be strictly positive, got {scales.tolist()}")

    if np.any(np.diff(scales) <= 0):
        raise InvalidScale(f"scales must be strictly increasing, got {scales.tolist()}")

    return scales


def morlet_kernel(scale: float, omega0: float = DEFAULT_MORLET_CENTER_FREQUENCY, truncation: float = CWT_TRUNCATION) -> np.ndarray:
    """
    Taps g(m) = scale^(-1/2) conj(psi(m / scale)) for |m| <= floor(truncation * scale).
    """
    half_width = int(np.floor(truncation * scale))
    m = np.arange(-half_width, half_width + 1, dtype=np.float64)

    return np.conj(morlet(m / scale, omega0)) / np.sqrt(scale)


def cwt_morlet(
        signal: np.ndarray,
        scales: Union[np.ndarray, list],
        omega0: float = DEFAULT_MORLET_CENTER_FREQUENCY,
        truncation: float = CWT_TRUNCATION) -> np.ndarray:
    """
    Magnitude of the Morlet CWT of every signal along the last axis.

    Entry (k, t) is |sum_u x(u) scale_k^(-1/2) conj(psi((u - t) / scale_k))| with the sum
    restricted to |u - t| <= truncation * scale_k and zero padding outside the signal.

    Args:
        signal (np.ndarray): samples with time on the last axis, shape [..., S].
        scales (np.ndarray): strictly increasing positive scales, length K.
        omega0 (float): Morlet center frequency.

    Returns:
        np.ndarray: magnitudes of shape [..., K, S].
    """
    scales = check_scales(scales)
    signal = np.asarray(signal, dtype=np.float64)
    S = signal.shape[-1]
    output = np.empty(signal.shape[:-1] + (len(scales), S), dtype=np.float64)

    if S == 0:
        return output

    for k, scale in enumerate(scales):
        kernel = morlet_kernel(scale, omega0, truncation)
        half_width = (len(kernel) - 1) // 2
        # correlation with g is convolution with g reversed; output t sits at index t + half_width
        reversed_kernel = kernel[::-1].reshape((1,) * (signal.ndim - 1) + (-1,))
        full = fftconvolve(signal, reversed_kernel, mode="full", axes=-1)
        output[..., k, :] = np.abs(full[..., half_width:half_width + S])

    return output


def cwt_morlet_direct(
        signal: np.ndarray,
        scales: Union[np.ndarray, list],
        omega0: float = DEFAULT_MORLET_CENTER_FREQUENCY,
        truncation: float = CWT_TRUNCATION) -> np.ndarray:
    """
    O(K S^2) double loop over the defining sum for a single signal [S] -> [K x S].
    Reference for alternative CWT backends.
    """
    scales = check_scales(scales)
    signal = np.asarray(signal, dtype=np.float64)
    S = len(signal)
    output = np.zeros((len(scales), S), dtype=np.float64)
    u = np.arange(S, dtype=np.float64)

    for k, scale in enumerate(scales):
        for t in range(S):
            offset = (u - t) / scale
            support = np.abs(offset) <= truncation
            total = np.sum(signal[support] * np.conj(morlet(offset[support], omega0))) / np.sqrt(scale)
            output[k, t] = abs(total)

    return output
