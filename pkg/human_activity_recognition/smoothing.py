import numpy as np


def moving_average(data: np.ndarray, M: int) -> np.ndarray:
    """
    Centered moving average over rows, truncated at the edges so the length is preserved.

    Row t of the output is the mean of input rows
    [t - floor((M - 1) / 2), t + ceil((M - 1) / 2)] intersected with [0, S).

    Args:
        data (np.ndarray): [S x C] matrix (a 1-d signal is treated as one channel).
        M (int): window length in samples, at least 1.

    Returns:
        np.ndarray: smoothed [S x C] matrix.
    """
    if M < 1:
        raise ValueError(f"moving average window must be at least 1, got {M}")

    data = np.asarray(data, dtype=np.float64)
    one_dimensional = data.ndim == 1

    if one_dimensional:
        data = data[:, np.newaxis]

    if M == 1 or data.shape[0] == 0:
        smoothed = data.copy()
        return smoothed[:, 0] if one_dimensional else smoothed

    S = data.shape[0]
    before = (M - 1) // 2
    after = M - 1 - before
    t = np.arange(S)
    lower = np.maximum(t - before, 0)
    upper = np.minimum(t + after, S - 1) + 1

    prefix = np.zeros((S + 1, data.shape[1]), dtype=np.float64)
    np.cumsum(data, axis=0, out=prefix[1:])

    smoothed = (prefix[upper] - prefix[lower]) / (upper - lower)[:, np.newaxis]
    # averaging cannot leave the channel's range
    smoothed = np.clip(smoothed, data.min(axis=0), data.max(axis=0))

    return smoothed[:, 0] if one_dimensional else smoothed
