import pytest

from human_activity_recognition import Timer


def test_timer_stops_at_the_end_of_a_block():
    with Timer() as timer:
        pass

    stopped = timer.duration

    assert stopped >= 0.0
    assert timer.duration == stopped
    assert format(timer, "0.3f") == f"{stopped:0.3f}"
    assert str(timer) == f"{stopped:0.2f}"


def test_timer_restarts():
    timer = Timer()
    timer.end()
    first = timer.duration
    timer.start()

    assert timer.duration >= 0.0
    assert first >= 0.0


def test_unstarted_timer():
    timer = Timer()
    timer._start_time = None

    with pytest.raises(RuntimeError):
        timer.duration
