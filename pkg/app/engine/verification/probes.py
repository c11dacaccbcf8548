import numpy as np

from app.engine.mesh.schemas import DomainGeometry, GeometryKind, VolumeMesh


def interior_probes(geometry: DomainGeometry, n: int, depth: float = 0.3, seed: int = 0) -> np.ndarray:
    """n reproducible random points at least depth * size away from the boundary."""
    rng = np.random.default_rng(seed)
    reach = (1.0 - depth) * geometry.size
    center = np.asarray(geometry.center)
    if geometry.kind == GeometryKind.BALL:
        directions = rng.normal(size=(n, 3))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = reach * rng.random(n) ** (1.0 / 3.0)
        return center + directions * radii[:, None]
    return center + rng.uniform(-reach, reach, size=(n, 3))


def deep_cells(geometry: DomainGeometry, volume: VolumeMesh, offset: float) -> np.ndarray:
    """
    Cells whose barycenter lies at least offset from the boundary.

    On coarse meshes the offset is capped at half the deepest barycenter so the set is never empty.
    """
    depth = geometry.distance_to_boundary(volume.barycenters)
    threshold = min(offset, 0.5 * float(depth.max()))
    return np.flatnonzero(depth >= threshold)


def spread_subset(indices: np.ndarray, limit: int) -> np.ndarray:
    """At most limit entries, evenly spread over indices."""
    if indices.size <= limit:
        return indices
    return indices[np.linspace(0, indices.size - 1, limit).round().astype(np.int64)]
