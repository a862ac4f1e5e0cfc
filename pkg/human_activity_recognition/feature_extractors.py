from typing import Union

import numpy as np

from .feature_config import FeatureConfig
from .exceptions import ShapeMismatch
from .morlet_CWT import cwt_morlet
from .segments import Segment


def _data(segment: Union[Segment, np.ndarray]) -> np.ndarray:
    if isinstance(segment, Segment):
        return segment.data

    return np.asarray(segment, dtype=np.float64)


def temporal_features(segment: Union[Segment, np.ndarray]) -> np.ndarray:
    """The preprocessed [S x C] matrix itself."""
    return np.array(_data(segment), dtype=np.float64, copy=True)


def statistical_vector(data: np.ndarray) -> np.ndarray:
    """
    Min, max, mean and population standard deviation over the time axis of [..., S, C] data,
    laid out channel-major: (min, max, mean, std) for channel 0, then channel 1, and so on.
    """
    data = np.asarray(data, dtype=np.float64)

    if data.ndim < 2 or data.shape[-2] < 2:
        raise ShapeMismatch(f"statistical features need [..., S, C] data with S >= 2, got shape {data.shape}")

    stacked = np.stack([
        data.min(axis=-2),
        data.max(axis=-2),
        data.mean(axis=-2),
        data.std(axis=-2),
    ], axis=-1)

    return stacked.reshape(data.shape[:-2] + (4 * data.shape[-1],))


def statistical_features(segment: Union[Segment, np.ndarray]) -> np.ndarray:
    """[4 C] vector of per-channel min, max, mean and std."""
    return statistical_vector(_data(segment))


def spectral_features(segment: Union[Segment, np.ndarray], config: FeatureConfig = None) -> np.ndarray:
    """
    Scalogram tensor [K x S x C]: the Morlet CWT magnitude of each channel at scales 1..K.
    """
    if config is None:
        config = FeatureConfig()

    config.validate()
    data = _data(segment)
    scales = config.scales
    spectral = np.empty((len(scales),) + data.shape, dtype=np.float64)

    for channel in range(data.shape[1]):
        spectral[:, :, channel] = cwt_morlet(data[:, channel], scales, config.morlet_center_frequency)

    return spectral


def spectral_batch(data: np.ndarray, config: FeatureConfig) -> np.ndarray:
    """Scalograms of a batch [B x S x C] as [B x K x S x C]."""
    transformed = cwt_morlet(np.swapaxes(data, 1, 2), config.scales, config.morlet_center_frequency)
    # [B, C, K, S] -> [B, K, S, C]
    return np.ascontiguousarray(np.transpose(transformed, (0, 2, 3, 1)))
