import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

from dotenv import load_dotenv

from app.exceptions.config_error import ConfigError

load_dotenv()

T = TypeVar('T')

# (target, quadrature point) pairs evaluated per row block
DEFAULT_BLOCK_ELEMENTS = 1_000_000


def worker_count() -> int:
    """BDIE_THREADS caps the assembly workers; 0 or unset means one per CPU."""
    raw = os.getenv('BDIE_THREADS', '0').strip() or '0'
    try:
        requested = int(raw)
    except ValueError:
        raise ConfigError(f'BDIE_THREADS must be an integer, got {raw!r}')
    if requested < 0:
        raise ConfigError(f'BDIE_THREADS must not be negative, got {requested}')
    return requested or (os.cpu_count() or 1)


def row_blocks(n_rows: int, block_size: int) -> List[slice]:
    block_size = max(1, block_size)
    return [slice(start, min(start + block_size, n_rows)) for start in range(0, n_rows, block_size)]


def block_size_for(n_columns: int, points_per_column: int) -> int:
    return max(1, DEFAULT_BLOCK_ELEMENTS // max(1, n_columns * points_per_column))


def map_row_blocks(fn: Callable[[slice], T], n_rows: int, block_size: int) -> List[T]:
    """Run fn over consecutive row blocks; results come back in row order."""
    blocks = row_blocks(n_rows, block_size)
    workers = min(worker_count(), len(blocks))
    if workers <= 1:
        return [fn(block) for block in blocks]
    logging.debug(f'Assembling {n_rows} rows in {len(blocks)} blocks on {workers} threads')
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))
