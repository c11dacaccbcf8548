import pytest

from app.exceptions.config_error import ConfigError
from app.runtime.workers import block_size_for, map_row_blocks, row_blocks, worker_count


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv('BDIE_THREADS', '3')
    assert worker_count() == 3

    monkeypatch.setenv('BDIE_THREADS', '0')
    assert worker_count() >= 1


@pytest.mark.parametrize('raw', ['many', '-2'])
def test_invalid_thread_count(monkeypatch, raw):
    monkeypatch.setenv('BDIE_THREADS', raw)

    with pytest.raises(ConfigError):
        worker_count()


def test_row_blocks_cover_rows():
    blocks = row_blocks(10, 4)

    assert blocks == [slice(0, 4), slice(4, 8), slice(8, 10)]
    assert row_blocks(0, 4) == []


def test_block_size_is_positive():
    assert block_size_for(10 ** 9, 10) == 1
    assert block_size_for(10, 10) == 10_000


@pytest.mark.parametrize('threads', ['1', '4'])
def test_map_row_blocks_keeps_order(monkeypatch, threads):
    monkeypatch.setenv('BDIE_THREADS', threads)

    results = map_row_blocks(lambda rows: list(range(rows.start, rows.stop)), 25, 3)

    assert [value for block in results for value in block] == list(range(25))


def test_map_row_blocks_runs_inline_for_one_worker(monkeypatch, mocker):
    monkeypatch.setenv('BDIE_THREADS', '1')
    pool = mocker.patch('app.runtime.workers.ThreadPoolExecutor')

    map_row_blocks(lambda rows: rows.stop - rows.start, 10, 2)

    pool.assert_not_called()
