import logging
import warnings
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning, blas, lapack, lu_factor, lu_solve
from scipy.sparse.linalg import gmres

from app.engine.bdie.schemas import BdieSystem, SolveMethod, Solution, SolverDiagnostics
from app.engine.potentials.schemas import BoundaryDensity, DomainDensity
from app.exceptions.solver_error import SolverError

DEFAULT_TOLERANCE = 1e-10
GMRES_RESTART = 50
GMRES_SAFETY = 0.1


def _factorize(matrix: np.ndarray, overwrite: bool = False):
    with warnings.catch_warnings():
        warnings.simplefilter('error', LinAlgWarning)
        try:
            lu, pivots = lu_factor(matrix, overwrite_a=overwrite, check_finite=True)
        except (LinAlgWarning, ValueError) as e:
            raise SolverError(f'LU factorization failed: {e}', condition_estimate=float('inf'))
    return lu, pivots


def _condition_from_lu(anorm: float, lu: np.ndarray) -> float:
    rcond, info = lapack.dgecon(lu, anorm, norm='1')
    if info != 0 or rcond <= 0.0:
        return float('inf')
    return 1.0 / float(rcond)


def estimate_condition(matrix: np.ndarray) -> float:
    """1-norm condition estimate from the LU factors (LAPACK gecon)."""
    anorm = float(np.linalg.norm(matrix, 1))
    lu, _ = _factorize(matrix)
    return _condition_from_lu(anorm, lu)


def relative_residual(matrix: np.ndarray, x: np.ndarray, rhs: np.ndarray) -> float:
    scale = float(np.linalg.norm(rhs))
    residual = float(np.linalg.norm(matrix @ x - rhs))
    return residual / scale if scale > 0.0 else residual


def factored_residual(lu: np.ndarray, pivots: np.ndarray, x: np.ndarray, rhs: np.ndarray) -> float:
    """Relative residual of L U x = P rhs, for when the matrix itself was overwritten by its factors."""
    upper = blas.dtrmv(lu, x, lower=0)
    product = blas.dtrmv(lu, upper, lower=1, diag=1)
    permuted = np.array(rhs, dtype=float)
    for row, pivot in enumerate(pivots):
        if pivot != row:
            permuted[[row, pivot]] = permuted[[pivot, row]]
    scale = float(np.linalg.norm(rhs))
    residual = float(np.linalg.norm(product - permuted))
    return residual / scale if scale > 0.0 else residual


def _direct(system: BdieSystem, overwrite: bool) -> Tuple[np.ndarray, Optional[float], Optional[float]]:
    anorm = float(np.linalg.norm(system.matrix, 1))
    lu, pivots = _factorize(system.matrix, overwrite)
    condition = _condition_from_lu(anorm, lu)
    if not np.isfinite(condition) or condition * np.finfo(float).eps >= 1.0:
        raise SolverError(
            f'BDIE matrix is singular to working precision (condition estimate {condition:.3g})',
            condition_estimate=condition,
        )
    x = lu_solve((lu, pivots), system.rhs)
    residual = factored_residual(lu, pivots, x, system.rhs) if overwrite else None
    return x, condition, residual


def _iterative(system: BdieSystem, tol: float, x0: Optional[np.ndarray]) -> Tuple[np.ndarray, Optional[float], int]:
    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    x, info = gmres(
        system.matrix,
        system.rhs,
        x0=x0,
        rtol=GMRES_SAFETY * tol,
        atol=0.0,
        restart=GMRES_RESTART,
        maxiter=max(10, system.size),
        callback=count,
        callback_type='pr_norm',
    )
    if info > 0:
        raise SolverError(f'GMRES did not reach tolerance {tol:g} after {iterations} iterations')
    if info < 0:
        raise SolverError(f'GMRES reported illegal input (info={info})')
    return x, None, iterations


def solve(
    system: BdieSystem,
    method: SolveMethod = SolveMethod.DIRECT_LU,
    tol: float = DEFAULT_TOLERANCE,
    x0: Optional[np.ndarray] = None,
    overwrite: bool = False,
) -> Solution:
    """
    Solve the BDIE system by LU or restarted GMRES.

    With overwrite=True the LU factors replace system.matrix, which must not be used afterwards.
    """
    logging.info(f'Solving {system.size}x{system.size} BDIE system with {method.value}, tol={tol:g}')
    if not np.all(np.isfinite(system.matrix)) or not np.all(np.isfinite(system.rhs)):
        raise SolverError('BDIE system has non-finite entries')

    residual: Optional[float] = None
    iterations: Optional[int] = None
    condition: Optional[float] = None
    if not np.any(system.rhs):
        x, iterations = np.zeros(system.size), 0
    elif method == SolveMethod.DIRECT_LU:
        x, condition, residual = _direct(system, overwrite)
    else:
        x, condition, iterations = _iterative(system, tol, x0)

    if residual is None:
        residual = relative_residual(system.matrix, x, system.rhs)
    if residual > tol:
        raise SolverError(f'relative residual {residual:.3g} exceeds tolerance {tol:g}', condition_estimate=condition)
    diagnostics = SolverDiagnostics(
        method=method,
        residual_norm=residual,
        tolerance=tol,
        condition_estimate=condition,
        iterations=iterations,
    )
    logging.info(f'Solved: residual={residual:.3g}, condition={condition}, iterations={iterations}')
    return Solution(
        u=DomainDensity(values=x[:system.n_cells]),
        psi=BoundaryDensity(values=x[system.n_cells:]),
        diagnostics=diagnostics,
        warnings=system.warnings,
    )
