import numpy as np
import pytest

from app.runtime.csv_report import REPORT_HEADER, format_value, read_report, write_report


@pytest.mark.parametrize('value, text', [
    (None, ''),
    (True, 'true'),
    (False, 'false'),
    (42, '42'),
    (0.1, '0.1'),
    (np.float64(1.5), '1.5'),
    (float('nan'), 'nan'),
    ('C1', 'C1'),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_report_layout(tmp_path):
    path = tmp_path / 'nested' / 'report.csv'
    blocks = [
        (('cell_id', 'u'), [(0, 1.0), (1, 0.5)]),
        (('panel_id', 'psi'), [(0, -0.25)]),
    ]

    write_report(path, blocks, metadata={'geometry': 'ball(1.0)', 'refinement': 1})

    assert path.read_text() == (
        f'{REPORT_HEADER}\n'
        '# geometry: ball(1.0)\n'
        '# refinement: 1\n'
        'cell_id,u\n'
        '0,1.0\n'
        '1,0.5\n'
        '\n'
        'panel_id,psi\n'
        '0,-0.25\n'
    )


def test_read_report_returns_blocks(tmp_path):
    path = tmp_path / 'report.csv'
    write_report(path, [(('a', 'b'), [(1, 2.0)]), (('c',), [('x',), ('y',)])], metadata={'case': 'C2'})

    comments, blocks = read_report(path)

    assert comments == [REPORT_HEADER, '# case: C2']
    assert blocks == [[['a', 'b'], ['1', '2.0']], [['c'], ['x'], ['y']]]


def test_reports_are_reproducible(tmp_path):
    rows = [(i, 1.0 / (i + 1)) for i in range(20)]

    first = write_report(tmp_path / 'first.csv', [(('i', 'value'), rows)])
    second = write_report(tmp_path / 'second.csv', [(('i', 'value'), iter(rows))])

    assert first.read_bytes() == second.read_bytes()
