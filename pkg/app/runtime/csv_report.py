import csv
import logging
import math
from pathlib import Path
from typing import Iterable, List, Mapping, Sequence, Tuple

REPORT_HEADER = '# bdie-report-v1'

Block = Tuple[Sequence[str], Iterable[Sequence[object]]]


def format_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, 'dtype'):
        number = float(value)
        if math.isnan(number):
            return 'nan'
        return repr(number)
    return str(value)


def write_report(path: Path, blocks: List[Block], metadata: Mapping[str, object] = None) -> Path:
    """
    Write one or more header+rows blocks separated by blank lines.

    The file starts with the versioned header comment, then one '# key: value' comment per metadata entry.
    Floats use the shortest round-trip representation so equal inputs give identical bytes.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='') as f:
        f.write(REPORT_HEADER + '\n')
        for key, value in (metadata or {}).items():
            f.write(f'# {key}: {format_value(value)}\n')
        writer = csv.writer(f, lineterminator='\n')
        for i, (header, rows) in enumerate(blocks):
            if i:
                f.write('\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
    logging.info(f'Wrote report {path}')
    return path


def read_report(path: Path) -> Tuple[List[str], List[List[List[str]]]]:
    """Inverse of write_report: (metadata comment lines, blocks of rows including their header)."""
    comments: List[str] = []
    blocks: List[List[List[str]]] = [[]]
    with Path(path).open(newline='') as f:
        for line in f:
            line = line.rstrip('\n')
            if line.startswith('#'):
                comments.append(line)
            elif not line:
                blocks.append([])
            else:
                blocks[-1].extend(csv.reader([line]))
    return comments, [block for block in blocks if block]
