import os

# environment fallback for the worker count
WORKERS_ENV = 'QFE_WORKERS'


def resolve_workers(workers: int | None = None) -> int:
    """Worker count from the flag, else ``QFE_WORKERS``, else the available CPUs"""
    if workers is None:
        env_value = os.environ.get(WORKERS_ENV)
        if env_value:
            try:
                workers = int(env_value)
            except ValueError:
                raise ValueError(f'{WORKERS_ENV} must be a positive integer, got "{env_value}"') from None
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError(f'The worker count must be a positive integer, got {workers}')
    return workers

def chunk_ranges(total: int, chunk_size: int) -> list[tuple[int, int]]:
    """Fixed ``[start, stop)`` boundaries; they depend on ``total`` and ``chunk_size`` only"""
    if chunk_size < 1:
        raise ValueError(f'chunk_size must be positive, got {chunk_size}')
    return [(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]
