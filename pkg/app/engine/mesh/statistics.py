import logging

import numpy as np
from pydantic import BaseModel

from app.engine.mesh.schemas import SurfaceMesh, VolumeMesh, signed_volumes

DEGENERATE_VOLUME = 1e-14


class MeshStatistics(BaseModel):
    h_surface: float
    h_volume: float
    n_vertices: int
    n_panels: int
    n_nodes: int
    n_cells: int
    min_quality: float
    degenerate_cells: int

    class Config:
        allow_mutation = False


def tet_quality(corners: np.ndarray) -> np.ndarray:
    """inradius / circumradius per tetrahedron (1/3 for the regular one, 0 when degenerate)."""
    a = corners[:, 1] - corners[:, 0]
    b = corners[:, 2] - corners[:, 0]
    c = corners[:, 3] - corners[:, 0]
    volume = np.abs(signed_volumes(corners))

    def face_area(p, q, r):
        return 0.5 * np.linalg.norm(np.cross(q - p, r - p), axis=1)

    faces = (
        face_area(corners[:, 1], corners[:, 2], corners[:, 3])
        + face_area(corners[:, 0], corners[:, 2], corners[:, 3])
        + face_area(corners[:, 0], corners[:, 1], corners[:, 3])
        + face_area(corners[:, 0], corners[:, 1], corners[:, 2])
    )
    numerator = (
        np.sum(a * a, axis=1)[:, None] * np.cross(b, c)
        + np.sum(b * b, axis=1)[:, None] * np.cross(c, a)
        + np.sum(c * c, axis=1)[:, None] * np.cross(a, b)
    )
    scale = np.max(np.linalg.norm(np.stack([a, b, c], axis=1), axis=2), axis=1)
    degenerate = volume <= DEGENERATE_VOLUME * np.maximum(scale, 1e-300) ** 3
    safe_volume = np.where(degenerate, 1.0, volume)
    inradius = 3.0 * safe_volume / np.where(faces > 0, faces, 1.0)
    circumradius = np.linalg.norm(numerator, axis=1) / (12.0 * safe_volume)
    return np.where(degenerate, 0.0, inradius / circumradius)


def mesh_statistics(surface: SurfaceMesh, volume: VolumeMesh) -> MeshStatistics:
    quality = tet_quality(volume.corners)
    degenerate = int(np.count_nonzero(quality == 0.0))
    if degenerate:
        logging.warning(f'{degenerate} degenerate cells in volume mesh')
    return MeshStatistics(
        h_surface=float(surface.diameters.max()),
        h_volume=float(volume.diameters.max()),
        n_vertices=int(surface.vertices.shape[0]),
        n_panels=surface.n_panels,
        n_nodes=int(volume.nodes.shape[0]),
        n_cells=volume.n_cells,
        min_quality=float(quality.min()),
        degenerate_cells=degenerate,
    )
