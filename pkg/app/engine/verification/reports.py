from pathlib import Path
from typing import List

from app.engine.bdie.conditioning import ConditionRow
from app.engine.verification.compare import ComparisonReport
from app.engine.verification.convergence import ORDER_METRICS, ConvergenceReport
from app.engine.verification.identities import IdentityReport
from app.runtime.csv_report import format_value, write_report

CONVERGENCE_FILE = 'convergence.csv'
IDENTITIES_FILE = 'identities.csv'
COMPARE_FILE = 'compare.csv'
CONDITIONING_FILE = 'conditioning.csv'

CONVERGENCE_COLUMNS = (
    'refinement', 'h', 'n_unknowns', 'err_u_L2', 'err_u_max', 'err_psi_L2', 'green_residual', 'cond_estimate',
    'solved',
)


def _order_cell(report: ConvergenceReport, metric: str, k: int) -> str:
    if report.exact:
        return 'exact'
    return format_value(report.orders[metric][k])


def write_convergence(report: ConvergenceReport, output_dir: Path) -> Path:
    """Runtimes stay out of the file so that reruns are byte-identical."""
    header = CONVERGENCE_COLUMNS + tuple(f'order_{metric}' for metric in ORDER_METRICS)
    rows = (
        [getattr(row, column) for column in CONVERGENCE_COLUMNS]
        + [_order_cell(report, metric, k) for metric in ORDER_METRICS]
        for k, row in enumerate(report.rows)
    )
    return write_report(
        Path(output_dir) / CONVERGENCE_FILE,
        [(header, rows)],
        metadata={'case': report.case, 'geometry': report.geometry},
    )


def write_identities(report: IdentityReport, output_dir: Path) -> Path:
    rows = (
        (r.identity, r.measured, r.comparison.value, r.threshold, r.passed, r.detail)
        for r in report.results
    )
    return write_report(
        Path(output_dir) / IDENTITIES_FILE,
        [(('identity', 'measured', 'comparison', 'threshold', 'passed', 'detail'), rows)],
        metadata={
            'geometry': report.geometry,
            'coefficient': report.coefficient,
            'refinement': report.refinement,
            'passed': report.passed,
        },
    )


def write_comparison(report: ComparisonReport, output_dir: Path) -> Path:
    rows = ((r.quantity, r.parametrix_x, r.parametrix_y, r.difference) for r in report.rows)
    return write_report(
        Path(output_dir) / COMPARE_FILE,
        [(('quantity', 'parametrix_x', 'parametrix_y', 'difference'), rows)],
        metadata={
            'geometry': report.geometry,
            'coefficient': report.coefficient,
            'refinement': report.refinement,
            'identical': report.identical,
            'remainder_ratio': report.remainder_ratio,
        },
    )


def write_conditioning(rows: List[ConditionRow], output_dir: Path, geometry: str, coefficient: str) -> Path:
    body = ((r.refinement, r.h, r.n_unknowns, r.cond_estimate, r.residual, r.singular) for r in rows)
    return write_report(
        Path(output_dir) / CONDITIONING_FILE,
        [(('refinement', 'h', 'n_unknowns', 'cond_estimate', 'residual', 'singular'), body)],
        metadata={'geometry': geometry, 'coefficient': coefficient},
    )
