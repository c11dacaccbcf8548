import logging
from pathlib import Path

from app.engine.bdie.schemas import DirichletProblem, RightHandSideKind, Solution
from app.runtime.csv_report import write_report

SOLUTION_FILE = 'solution.csv'
DIAGNOSTICS_FILE = 'diagnostics.json'


def _metadata(problem: DirichletProblem, solution: Solution) -> dict:
    metadata = {
        'geometry': f'{problem.geometry.kind.value}({problem.geometry.size!r})',
        'refinement': problem.refinement,
        'coefficient': problem.field.describe(),
        'rhs': problem.rhs.kind.value,
        'cells': problem.volume.n_cells,
        'panels': problem.surface.n_panels,
    }
    if problem.rhs.kind == RightHandSideKind.POINT_SOURCES:
        for i, source in enumerate(problem.rhs.sources):
            x, y, z = source.location
            metadata[f'source_{i}'] = f'location=({x!r} {y!r} {z!r}) strength={source.strength!r}'
    for i, warning in enumerate(solution.warnings):
        metadata[f'warning_{i}'] = warning
    return metadata


def write_solution(solution: Solution, problem: DirichletProblem, output_dir: Path) -> Path:
    """solution.csv: cell block (cell_id, x, y, z, u) then panel block (panel_id, x, y, z, psi)."""
    volume, surface = problem.volume, problem.surface
    cells = (
        (i, *volume.barycenters[i], solution.u.values[i])
        for i in range(volume.n_cells)
    )
    panels = (
        (j, *surface.centroids[j], solution.psi.values[j])
        for j in range(surface.n_panels)
    )
    return write_report(
        Path(output_dir) / SOLUTION_FILE,
        [
            (('cell_id', 'x', 'y', 'z', 'u'), cells),
            (('panel_id', 'x', 'y', 'z', 'psi'), panels),
        ],
        metadata=_metadata(problem, solution),
    )


def write_diagnostics(solution: Solution, output_dir: Path) -> Path:
    path = Path(output_dir) / DIAGNOSTICS_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(solution.diagnostics.json(indent=2, sort_keys=True) + '\n')
    logging.info(f'Wrote diagnostics {path}')
    return path
