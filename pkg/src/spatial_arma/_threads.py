import os

ENV_VAR = "SPATIAL_ARMA_THREADS"


def worker_count() -> int:
    """Parallelism cap from ``SPATIAL_ARMA_THREADS`` (default 1)."""
    raw = os.environ.get(ENV_VAR, "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
