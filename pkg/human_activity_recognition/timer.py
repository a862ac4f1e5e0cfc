"""
Wall-clock timer for pipeline stages and model fitting.
"""
import time

DEFAULT_FORMAT = "0.2f"

class Timer(object):
    """
    Perf-counter stopwatch. Starts on construction and again on entering a `with` block.
    Formats itself as elapsed seconds, so it can be dropped into log messages directly.
    """

    def __init__(self):
        self._start_time = None
        self._end_time = None
        self.start()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *args):
        self.end()

    def __repr__(self):
        return format(self)

    def __str__(self):
        return format(self)

    def __format__(self, format_string=DEFAULT_FORMAT):
        return format(self.duration, format_string or DEFAULT_FORMAT)

    @property
    def now(self) -> float:
        return time.perf_counter()

    def start(self) -> float:
        self._start_time = self.now
        self._end_time = None

        return self._start_time

    def end(self) -> float:
        self._end_time = self.now

        return self._end_time

    @property
    def duration(self) -> float:
        if self._start_time is None:
            raise RuntimeError("timer never started")

        end_time = self.now if self._end_time is None else self._end_time

        return end_time - self._start_time
