import numpy as np
import pytest

from human_activity_recognition import (
    ActivityLabel,
    ConfigError,
    DegenerateChannel,
    IngestError,
    InsufficientSegments,
    InvalidPreprocessConfig,
    PreprocessConfig,
    RawRecording,
    Segment,
    SynthSpec,
    apply_normalization,
    fit_normalization,
    invert_normalization,
    load_segment_cache,
    moving_average,
    preprocess_pipeline,
    save_segment_cache,
    segment,
    segment_count,
    segment_recordings,
    stratified_split,
    synth_generate,
)

WALKING = ActivityLabel(0, "walking")
JOGGING = ActivityLabel(1, "jogging")


def recording(length, channels=3, user=1, label=WALKING, seed=0):
    data = np.random.default_rng(seed).normal(size=(length, channels))
    return RawRecording(user_id=user, activity=label, channels=data, channel_names=[f"c{c}" for c in range(channels)])


def make_segment(segment_id, data, label=WALKING, user=1):
    return Segment(
        id=segment_id,
        data=np.asarray(data, dtype=np.float64),
        label=label,
        user_id=user,
        source_recording=0,
        start_index=0,
    )


def test_default_stride():
    assert PreprocessConfig().stride == 45


@pytest.mark.parametrize("length,starts", [
    (240, [0, 45, 90]),
    (149, []),
    (150, [0]),
])
def test_segment_starts(length, starts):
    segments = segment(recording(length), PreprocessConfig())

    assert [item.start_index for item in segments] == starts
    assert all(item.data.shape == (150, 3) for item in segments)
    assert all(item.label == WALKING and item.user_id == 1 for item in segments)


def test_segment_count_formula_sweep():
    rng = np.random.default_rng(1)

    for _ in range(200):
        window_size = int(rng.integers(1, 60))
        stride = int(rng.integers(1, 30))
        length = int(rng.integers(0, 200))
        expected = len([start for start in range(0, length) if start % stride == 0 and start + window_size <= length])

        assert segment_count(length, window_size, stride) == expected


def test_segment_copies_the_recording_rows():
    source = recording(240)
    segments = segment(source, PreprocessConfig())

    np.testing.assert_array_equal(segments[1].data, source.channels[45:195])


def test_segment_ids_enumerate_the_corpus():
    recordings = [recording(240, user=1), recording(100, user=2), recording(195, user=3)]
    segments = segment_recordings(recordings, PreprocessConfig())

    assert [item.id for item in segments] == [0, 1, 2, 3, 4]
    assert [item.source_recording for item in segments] == [0, 0, 0, 2, 2]
    assert [item.start_index for item in segments] == [0, 45, 90, 0, 45]


@pytest.mark.parametrize("window_size,overlap,smoothing", [
    (10, 0.5, 11),
    (10, 1.0, 3),
    (10, -0.1, 3),
    (10, 0.5, 0),
])
def test_invalid_preprocess_config(window_size, overlap, smoothing):
    with pytest.raises(InvalidPreprocessConfig):
        PreprocessConfig(window_size=window_size, overlap_fraction=overlap, smoothing_window=smoothing).validate()


def test_moving_average_of_constant():
    data = np.full((20, 2), 3.25)

    np.testing.assert_array_equal(moving_average(data, 10), data)


def test_moving_average_window_one_is_identity():
    data = np.random.default_rng(2).normal(size=(15, 3))

    np.testing.assert_array_equal(moving_average(data, 1), data)


def test_moving_average_matches_prefix_sum_oracle():
    series = np.array([3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0, -6.0, 5.0, 3.0, -5.0, 8.0])
    smoothed = moving_average(series, 10)
    prefix = np.concatenate([[0.0], np.cumsum(series)])

    def oracle(t):
        lower = max(t - 4, 0)
        upper = min(t + 5, len(series) - 1) + 1
        return (prefix[upper] - prefix[lower]) / (upper - lower)

    assert smoothed.shape == series.shape

    for t in range(len(series)):
        assert smoothed[t] == pytest.approx(oracle(t), abs=1e-12)

    # interior point: a full 10-term window
    assert smoothed[5] == pytest.approx(np.mean(series[1:11]), abs=1e-12)


def test_moving_average_is_shift_equivariant_and_range_preserving():
    data = np.random.default_rng(3).normal(size=(50, 3))
    smoothed = moving_average(data, 7)

    np.testing.assert_allclose(moving_average(data + 2.5, 7), smoothed + 2.5, atol=1e-12)
    assert np.all(smoothed.min(axis=0) >= data.min(axis=0))
    assert np.all(smoothed.max(axis=0) <= data.max(axis=0))


def test_fit_normalization_single_segment():
    stats = fit_normalization([make_segment(0, [[-2.0], [6.0], [1.0]])])

    assert stats.minimum.tolist() == [-2.0]
    assert stats.maximum.tolist() == [6.0]


def test_fit_normalization_union_of_ranges():
    stats = fit_normalization([make_segment(0, [[0.0], [1.0]]), make_segment(1, [[-1.0], [2.0]])])

    assert stats.minimum.tolist() == [-1.0]
    assert stats.maximum.tolist() == [2.0]


def test_fit_normalization_rejects_degenerate_channel():
    with pytest.raises(DegenerateChannel, match="acc_y"):
        fit_normalization([make_segment(0, [[0.0, 1.0], [1.0, 1.0]])], channel_names=["acc_x", "acc_y"])


def test_normalization_endpoints_midpoint_and_clamp():
    stats = fit_normalization([make_segment(0, [[-2.0], [6.0]])])
    normalized = apply_normalization(make_segment(1, [[-2.0], [6.0], [2.0], [-10.0], [7.0]]), stats)

    assert normalized.data[:, 0].tolist() == [0.0, 1.0, 0.5, 0.0, 1.0]


def test_normalization_inverse():
    stats = fit_normalization([make_segment(0, [[-2.0, 0.0], [6.0, 4.0]])])
    original = make_segment(1, [[-1.0, 1.0], [5.0, 3.5]])

    restored = invert_normalization(apply_normalization(original, stats), stats)

    np.testing.assert_allclose(restored.data, original.data, atol=1e-12)


def test_normalization_preserves_argmax_and_argmin():
    segments = [make_segment(index, np.random.default_rng(index).normal(size=(30, 3))) for index in range(4)]
    stats = fit_normalization(segments)

    for item in segments:
        normalized = apply_normalization(item, stats).data
        assert np.array_equal(np.argmax(normalized, axis=0), np.argmax(item.data, axis=0))
        assert np.array_equal(np.argmin(normalized, axis=0), np.argmin(item.data, axis=0))


def test_pipeline_on_empty_corpus():
    assert preprocess_pipeline([], PreprocessConfig()) == ([], None)


def test_pipeline_round_trip_restores_smoothed_values():
    recordings = synth_generate(SynthSpec(classes=2, users=2, channels=3, length=120, noise_level=0.0))
    config = PreprocessConfig(window_size=40, overlap_fraction=0.5, smoothing_window=5)
    segments, stats = preprocess_pipeline(recordings, config)
    smoothed = [moving_average(item.data, 5) for item in segment_recordings(recordings, config)]

    assert stats.fitted_on == "all"

    for item, expected in zip(segments, smoothed):
        assert 0.0 <= item.data.min() and item.data.max() <= 1.0
        np.testing.assert_allclose(invert_normalization(item, stats).data, expected, atol=1e-12)


def test_pipeline_fits_on_training_ids_and_is_deterministic():
    recordings = synth_generate(SynthSpec(classes=2, users=3, channels=2, length=100))
    config = PreprocessConfig(window_size=20, overlap_fraction=0.5, smoothing_window=3)
    train_ids = list(range(0, 30))

    first, stats = preprocess_pipeline(recordings, config, train_ids=train_ids)
    second, _ = preprocess_pipeline(recordings, config, train_ids=train_ids, workers=2)

    assert stats.fitted_on == "train"
    assert first == second

    for item in first:
        if item.id in train_ids:
            assert 0.0 <= item.data.min() and item.data.max() <= 1.0


def labeled_segments(counts, users=None):
    segments = []

    for class_index, count in enumerate(counts):
        for position in range(count):
            user = users[position % len(users)] if users else 1
            segments.append(make_segment(len(segments), np.zeros((4, 1)), label=ActivityLabel(class_index, f"class_{class_index}"), user=user))

    return segments


def test_stratified_split_proportions():
    segments = labeled_segments([20, 30])
    split = stratified_split(segments, seed=0)

    assert split.sizes == (35, 5, 10)
    split.check_disjoint()
    assert sorted(split.train + split.val + split.test) == list(range(50))

    labels = {item.id: item.label.class_index for item in segments}
    assert sum(labels[item] == 0 for item in split.train) == 14
    assert sum(labels[item] == 0 for item in split.val) == 2
    assert sum(labels[item] == 0 for item in split.test) == 4


@pytest.mark.parametrize("strategy", ["segment_stratified", "by_user"])
def test_split_is_a_partition_for_every_seed(strategy):
    segments = labeled_segments([23, 31, 17], users=[1, 2, 3, 4, 5, 6, 7])
    every_id = list(range(len(segments)))

    for seed in range(100):
        split = stratified_split(segments, seed=seed, strategy=strategy)
        split.check_disjoint()

        assert sorted(split.train + split.val + split.test) == every_id


def test_stratified_split_is_seeded():
    segments = labeled_segments([20, 20])

    assert stratified_split(segments, seed=4).to_dict() == stratified_split(segments, seed=4).to_dict()
    assert stratified_split(segments, seed=4).train != stratified_split(segments, seed=5).train


def test_stratified_split_names_small_class():
    with pytest.raises(InsufficientSegments, match="class_1"):
        stratified_split(labeled_segments([20, 9]))


def test_split_rejects_bad_ratios():
    with pytest.raises(ConfigError):
        stratified_split(labeled_segments([20, 20]), ratios=(0.5, 0.5, 0.5))


def test_by_user_split_keeps_users_together():
    segments = labeled_segments([30, 30], users=[1, 2, 3, 4, 5, 6])
    split = stratified_split(segments, seed=0, strategy="by_user")
    users = {item.id: item.user_id for item in segments}
    groups = [{users[item] for item in ids} for ids in (split.train, split.val, split.test)]

    assert all(groups)
    assert not (groups[0] & groups[1]) and not (groups[0] & groups[2]) and not (groups[1] & groups[2])
    assert sum(split.sizes) == 60


def test_by_user_split_needs_three_users():
    with pytest.raises(InsufficientSegments):
        stratified_split(labeled_segments([20, 20], users=[1, 2]), strategy="by_user")


def test_segment_cache_round_trip(tmp_path):
    recordings = synth_generate(SynthSpec(classes=2, users=2, channels=3, length=80))
    config = PreprocessConfig(window_size=20, overlap_fraction=0.5, smoothing_window=3)
    segments, stats = preprocess_pipeline(recordings, config)
    corpus, key = "a" * 64, "b" * 64
    filename = save_segment_cache(
        str(tmp_path / "segments.bin"), segments, stats, corpus, key,
        ["class_0", "class_1"], ["acc_x", "acc_y", "acc_z"],
    )

    loaded, loaded_stats = load_segment_cache(filename, corpus, key)

    assert loaded == segments
    assert np.array_equal(loaded_stats.minimum, stats.minimum)
    assert np.array_equal(loaded_stats.maximum, stats.maximum)
    assert load_segment_cache(filename, corpus, "c" * 64) is None
    assert load_segment_cache(str(tmp_path / "absent.bin"), corpus, key) is None


def test_segment_cache_rejects_foreign_file(tmp_path):
    filename = tmp_path / "segments.bin"
    filename.write_bytes(b"not a cache" * 40)

    with pytest.raises(IngestError):
        load_segment_cache(str(filename), "a" * 64, "b" * 64)
