import logging
import time

import numpy as np

from app.engine.kernels.evaluate import EPS_SING
from app.engine.mesh.schemas import SurfaceMesh, VolumeMesh
from app.engine.potentials.schemas import TargetSet
from app.engine.quadrature.cell import integrate_cells_far, integrate_cells_near, integrate_cells_self
from app.engine.quadrature.integrands import Integrand
from app.engine.quadrature.panel import integrate_panels_far, integrate_panels_near, integrate_panels_self
from app.engine.quadrature.rules import FAR_CELL_ORDER, FAR_PANEL_ORDER, tet_rule, triangle_rule
from app.engine.quadrature.schemas import SingularPolicy
from app.exceptions.assembly_error import AssemblyError
from app.runtime.workers import block_size_for, map_row_blocks

NEAR_PAIR_CHUNK = 20_000


def singularity_radius(points: np.ndarray) -> float:
    extent = float(np.max(np.ptp(points, axis=0))) if points.size else 1.0
    return EPS_SING * max(extent, 1.0)


def _in_chunks(fn, n: int, chunk: int = NEAR_PAIR_CHUNK) -> np.ndarray:
    if n == 0:
        return np.zeros(0)
    return np.concatenate([fn(slice(start, min(start + chunk, n))) for start in range(0, n, chunk)])


def _target_normals(targets: TargetSet, integrand_needs: bool):
    if integrand_needs and targets.normals is None:
        raise AssemblyError(f'targets "{targets.label}" carry no normals but the operator needs them')
    return targets.normals


def surface_rows(
    surface: SurfaceMesh,
    targets: TargetSet,
    integrand: Integrand,
    policy: SingularPolicy,
    needs_target_normals: bool = False,
) -> np.ndarray:
    """
    Integral of the kernel over every panel for every target: (targets, panels).

    Far pairs use the fixed rule in bulk; pairs within near_threshold diameters are redone adaptively and a
    target sitting at a panel centroid gets that panel's self term.
    """
    corners = surface.corners
    normals = surface.normals
    diameters = surface.diameters
    centroids = surface.centroids
    target_normals = _target_normals(targets, needs_target_normals)
    eps = singularity_radius(surface.vertices)
    n_panels = surface.n_panels

    def block(rows: slice) -> np.ndarray:
        y = targets.points[rows]
        ny = None if target_normals is None else target_normals[rows]
        values = integrate_panels_far(integrand, corners, normals, y, ny)

        own = targets.panel_of[rows][:, None] == np.arange(n_panels)[None, :]
        distance = np.linalg.norm(y[:, None, :] - centroids[None, :, :], axis=-1)
        near = (distance <= policy.near_threshold * diameters[None, :]) & ~own

        t_idx, e_idx = np.nonzero(near)
        values[t_idx, e_idx] = _in_chunks(
            lambda c: integrate_panels_near(
                integrand,
                corners[e_idx[c]],
                normals[e_idx[c]],
                y[t_idx[c]],
                policy,
                None if ny is None else ny[t_idx[c]],
                eps,
            ),
            t_idx.size,
        )
        t_idx, e_idx = np.nonzero(own)
        if t_idx.size:
            values[t_idx, e_idx] = integrate_panels_self(integrand, corners[e_idx], normals[e_idx], policy)
        return values

    size = block_size_for(n_panels, triangle_rule(FAR_PANEL_ORDER).weights.size)
    return _stack(map_row_blocks(block, targets.size, size), targets.size, n_panels)


def volume_rows(
    volume: VolumeMesh,
    targets: TargetSet,
    integrand: Integrand,
    policy: SingularPolicy,
) -> np.ndarray:
    """Integral of the kernel over every cell for every target: (targets, cells)."""
    corners = volume.corners
    diameters = volume.diameters
    barycenters = volume.barycenters
    n_cells = volume.n_cells

    def block(rows: slice) -> np.ndarray:
        y = targets.points[rows]
        ny = None if targets.normals is None else targets.normals[rows]
        values = integrate_cells_far(integrand, corners, y, ny)

        own = targets.cell_of[rows][:, None] == np.arange(n_cells)[None, :]
        distance = np.linalg.norm(y[:, None, :] - barycenters[None, :, :], axis=-1)
        near = (distance <= policy.near_threshold * diameters[None, :]) & ~own

        t_idx, e_idx = np.nonzero(near)
        values[t_idx, e_idx] = _in_chunks(
            lambda c: integrate_cells_near(
                integrand,
                corners[e_idx[c]],
                y[t_idx[c]],
                policy,
                None if ny is None else ny[t_idx[c]],
            ),
            t_idx.size,
        )
        t_idx, e_idx = np.nonzero(own)
        if t_idx.size:
            values[t_idx, e_idx] = integrate_cells_self(integrand, corners[e_idx], policy)
        return values

    size = block_size_for(n_cells, tet_rule(FAR_CELL_ORDER).weights.size)
    return _stack(map_row_blocks(block, targets.size, size), targets.size, n_cells)


def _stack(blocks, n_rows: int, n_columns: int) -> np.ndarray:
    if not blocks:
        return np.zeros((n_rows, n_columns))
    values = np.concatenate(blocks, axis=0)
    if not np.all(np.isfinite(values)):
        raise AssemblyError('assembled matrix has non-finite entries')
    return values


class timed:
    """Logs start, finish and duration of one assembly."""

    def __init__(self, what: str):
        self.what = what

    def __enter__(self):
        self.start = time.perf_counter()
        logging.info(f'Assembling {self.what}')
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            logging.info(f'Assembled {self.what} in {time.perf_counter() - self.start:.2f}s')
        else:
            logging.error(f'Assembly of {self.what} failed: {exc}')
        return False
