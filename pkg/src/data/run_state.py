import logging
import os

logger = logging.getLogger(__name__)

THREADS_ENV = "BILATTICE_THREADS"


class RunState:
    """Process-wide knobs for the current run: worker count and progress bars."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(RunState, cls).__new__(cls)
            cls._instance.threads = thread_cap() or 1
            cls._instance.show_progress = False
            cls._instance.warnings_seen = []
        return cls._instance

    @classmethod
    def get_instance(cls):
        if cls._instance is None:
            cls()
        return cls._instance

    @classmethod
    def reset(cls):
        cls._instance = None

    def set_threads(self, n):
        # BILATTICE_THREADS caps whatever the config asks for
        cap = thread_cap()
        n = max(1, int(n))
        self.threads = min(n, cap) if cap else n
        logger.debug("worker threads set to %d", self.threads)

    def record_warning(self, message):
        self.warnings_seen.append(str(message))


def thread_cap():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
        return None
