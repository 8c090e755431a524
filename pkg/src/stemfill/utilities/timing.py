import time


class Stopwatch:
    """Wall-clock timer used around solver calls."""

    def __init__(self):
        self.started = None
        self.elapsed = 0.0

    def __enter__(self):
        self.started = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.started
        return False
