from gsm.utils.functional import largest_doubling, levels_of, parse_grid, safe_floor, stable_sum
from gsm.utils.random import RandomStream

__all__ = [
    'largest_doubling',
    'levels_of',
    'parse_grid',
    'safe_floor',
    'stable_sum',
    'RandomStream',
]
