import numpy as np
import pandas as pd
import pytest

from human_activity_recognition import (
    ActivityLabel,
    EmptySelection,
    FeatureBatch,
    FeatureConfig,
    FeatureStore,
    InvalidFeatureConfig,
    InvalidScale,
    MissingRepresentation,
    Segment,
    SegmentSelector,
    ShapeMismatch,
    cwt_morlet,
    cwt_morlet_direct,
    dump_features,
    extract_bundle,
    load_bundle,
    read_feature_dump,
    save_bundle,
    spectral_batch,
    spectral_features,
    statistical_features,
    temporal_features,
    write_feature_dump,
)

CLASSES = [ActivityLabel(0, "Walking"), ActivityLabel(1, "Jogging")]


def make_segment(segment_id, data, label=CLASSES[0]):
    return Segment(id=segment_id, data=np.asarray(data, dtype=np.float64), label=label, user_id=1, source_recording=0, start_index=0)


def random_segments(count, S=24, C=3, seed=0):
    rng = np.random.default_rng(seed)
    return [make_segment(index, rng.uniform(size=(S, C)), label=CLASSES[index % 2]) for index in range(count)]


def relative_frobenius(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def test_temporal_features_copy_the_segment():
    item = make_segment(0, np.arange(12.0).reshape(4, 3))
    temporal = temporal_features(item)

    np.testing.assert_array_equal(temporal, item.data)
    temporal[0, 0] = 99.0
    assert item.data[0, 0] == 0.0


def test_statistical_features_of_constant_and_alternating_channels():
    data = np.stack([np.full(8, 2.5), np.tile([0.0, 1.0], 4)], axis=1)

    np.testing.assert_allclose(statistical_features(data), [2.5, 2.5, 2.5, 0.0, 0.0, 1.0, 0.5, 0.5])


def test_statistical_features_layout_and_ordering():
    segments = random_segments(10, S=150, C=3)

    for item in segments:
        vector = statistical_features(item)
        assert vector.shape == (12,)
        per_channel = vector.reshape(3, 4)
        assert np.all(per_channel[:, 0] <= per_channel[:, 2])
        assert np.all(per_channel[:, 2] <= per_channel[:, 1])
        assert np.all(per_channel[:, 3] >= 0)


def test_statistical_features_need_two_samples():
    with pytest.raises(ShapeMismatch):
        statistical_features(np.zeros((1, 3)))


def test_cwt_of_zero_signal():
    np.testing.assert_array_equal(cwt_morlet(np.zeros(64), np.arange(1, 11)), np.zeros((10, 64)))


def test_cwt_is_homogeneous():
    signal = np.random.default_rng(1).normal(size=64)
    scales = np.arange(1, 21)

    np.testing.assert_allclose(cwt_morlet(3.5 * signal, scales), 3.5 * cwt_morlet(signal, scales), rtol=1e-10, atol=1e-12)


def test_cwt_matches_direct_oracle():
    rng = np.random.default_rng(2)
    scales = np.arange(1, 51, dtype=np.float64)

    for _ in range(10):
        signal = rng.normal(size=64)
        assert relative_frobenius(cwt_morlet(signal, scales), cwt_morlet_direct(signal, scales)) < 1e-9


@pytest.mark.slow
def test_cwt_matches_direct_oracle_on_many_signals():
    rng = np.random.default_rng(3)
    scales = np.arange(1, 51, dtype=np.float64)

    for _ in range(200):
        signal = rng.normal(size=64)
        assert relative_frobenius(cwt_morlet(signal, scales), cwt_morlet_direct(signal, scales)) < 1e-9


def test_cwt_peak_scale_of_a_sinusoid():
    w = 0.6
    signal = np.sin(w * np.arange(512))
    energy = (cwt_morlet(signal, np.arange(1, 51))[:, 100:-100] ** 2).mean(axis=1)

    assert np.argmax(energy) + 1 == round(6.0 / w)


def test_cwt_time_shift_covariance():
    scales = np.arange(1, 9)
    pulse = np.zeros(128)
    pulse[50] = 1.0
    shifted = np.roll(pulse, 10)

    original = cwt_morlet(pulse, scales)
    moved = cwt_morlet(shifted, scales)

    np.testing.assert_allclose(moved[:, 50:90], original[:, 40:80], atol=1e-12)


@pytest.mark.parametrize("scales", [[0.0, 1.0], [-1.0, 2.0], [2.0, 1.0], [1.0, 1.0], []])
def test_cwt_rejects_invalid_scales(scales):
    with pytest.raises(InvalidScale):
        cwt_morlet(np.ones(16), scales)


def test_spectral_features_shape_and_channel_independence():
    item = random_segments(1, S=150, C=6)[0]
    config = FeatureConfig()
    spectral = spectral_features(item, config)

    assert spectral.shape == (50, 150, 6)

    for channel in range(6):
        np.testing.assert_array_equal(spectral[:, :, channel], cwt_morlet(item.data[:, channel], config.scales))


def test_spectral_batch_matches_single_segments():
    segments = random_segments(4, S=32, C=3)
    config = FeatureConfig(cwt_scales=8)
    batch = spectral_batch(np.stack([item.data for item in segments]), config)

    assert batch.shape == (4, 8, 32, 3)

    for position, item in enumerate(segments):
        np.testing.assert_allclose(batch[position], spectral_features(item, config), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("changes", [
    {"cwt_scales": 0},
    {"wavelet": "haar"},
    {"morlet_center_frequency": 0.0},
    {"spectral_value": "power"},
])
def test_invalid_feature_config(changes):
    with pytest.raises(InvalidFeatureConfig):
        FeatureConfig(**changes).validate()


def test_bundle_cache_round_trip(tmp_path):
    bundle = extract_bundle(random_segments(1, S=20, C=3)[0], FeatureConfig(cwt_scales=5))

    assert bundle.temporal.shape == (20, 3)
    assert bundle.statistical.shape == (12,)
    assert bundle.spectral.shape == (5, 20, 3)
    assert load_bundle(save_bundle(bundle, str(tmp_path / "bundle.npz"))) == bundle


def test_feature_store_batches_are_read_only_and_selective():
    segments = random_segments(6, S=20, C=3)
    store = FeatureStore(segments, FeatureConfig(cwt_scales=4))
    batch = store.batch([4, 1], ["temporal", "statistical"])

    assert batch.ids.tolist() == [4, 1]
    assert batch.labels.tolist() == [0, 1]
    assert batch.spectral is None
    assert batch.temporal.shape == (2, 20, 3)
    np.testing.assert_allclose(batch.statistical[0], statistical_features(segments[4]), rtol=1e-13)

    with pytest.raises(ValueError):
        batch.temporal[0, 0, 0] = 1.0

    with pytest.raises(MissingRepresentation, match="spectral"):
        batch.representation("spectral")


def test_feature_store_rejects_unknown_representation():
    store = FeatureStore(random_segments(2), FeatureConfig(cwt_scales=2))

    with pytest.raises(MissingRepresentation):
        store.batch([0], ["mfcc"])


def test_feature_store_spectral_matches_extraction_and_caches(tmp_path):
    segments = random_segments(3, S=16, C=2)
    config = FeatureConfig(cwt_scales=6)
    store = FeatureStore(segments, config, cache_directory=str(tmp_path), cache_key="abc")
    computed = store.spectral([2, 0])

    np.testing.assert_allclose(computed[0], spectral_features(segments[2], config), rtol=1e-12, atol=1e-12)
    assert (tmp_path / "abc" / "2.npy").exists()

    cached = FeatureStore(segments, config, cache_directory=str(tmp_path), cache_key="abc").spectral([2, 0])
    np.testing.assert_allclose(cached, computed, rtol=1e-6, atol=1e-7)


def test_feature_batch_from_bundles_and_take():
    config = FeatureConfig(cwt_scales=3)
    bundles = [extract_bundle(item, config) for item in random_segments(3, S=10, C=2)]
    batch = FeatureBatch.from_bundles(bundles, labels=[0, 1, 0])
    taken = batch.take([2])

    assert len(batch) == 3
    assert batch.spectral.shape == (3, 3, 10, 2)
    assert taken.ids.tolist() == [2]
    np.testing.assert_array_equal(taken.temporal[0], bundles[2].temporal)


def test_feature_dump_round_trip(tmp_path):
    config = FeatureConfig(cwt_scales=4)
    bundle = extract_bundle(random_segments(1, S=12, C=3)[0], config)
    filenames = write_feature_dump(bundle, str(tmp_path), ["acc_x", "acc_y", "acc_z"], config.scales)

    spectral = pd.read_csv(filenames["spectral"])
    assert list(spectral.columns) == ["scale", "time", "channel", "value"]
    assert len(spectral) == 4 * 12 * 3

    temporal = pd.read_csv(filenames["temporal"], index_col=0)
    assert list(temporal.columns) == ["acc_x", "acc_y", "acc_z"]
    assert len(temporal) == 12

    assert read_feature_dump(str(tmp_path), bundle.segment_id) == bundle


def test_dump_features_by_class_and_by_id(tmp_path):
    store = FeatureStore(random_segments(5, S=12, C=3), FeatureConfig(cwt_scales=3))
    channels = ["acc_x", "acc_y", "acc_z"]

    by_class = dump_features(store, SegmentSelector(class_name="jogging"), str(tmp_path / "class"), channels)
    assert len(by_class) == 1
    assert by_class[0]["temporal"].endswith("segment_1_temporal.csv")

    by_id = dump_features(store, SegmentSelector(segment_id=4), str(tmp_path / "id"), channels)
    assert by_id[0]["spectral"].endswith("segment_4_spectral.csv")
    assert read_feature_dump(str(tmp_path / "id"), 4) == store.bundle(4)


def test_dump_features_empty_selection(tmp_path):
    store = FeatureStore(random_segments(2), FeatureConfig(cwt_scales=2))

    with pytest.raises(EmptySelection):
        dump_features(store, SegmentSelector(class_name="Sitting"), str(tmp_path), ["a", "b", "c"])

    with pytest.raises(EmptySelection):
        dump_features(store, SegmentSelector(segment_id=99), str(tmp_path), ["a", "b", "c"])
