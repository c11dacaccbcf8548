import itertools
import logging
import math
from typing import Dict, Tuple

import numpy as np

from app.engine.mesh.schemas import DomainGeometry, GeometryKind, SurfaceMesh, VolumeMesh, signed_volumes
from app.exceptions.mesh_error import MeshError

MAX_BALL_REFINEMENT = 6
MAX_CUBE_DIVISIONS = 24

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

ICOSAHEDRON_VERTICES = np.array([
    [-1.0, GOLDEN, 0.0],
    [1.0, GOLDEN, 0.0],
    [-1.0, -GOLDEN, 0.0],
    [1.0, -GOLDEN, 0.0],
    [0.0, -1.0, GOLDEN],
    [0.0, 1.0, GOLDEN],
    [0.0, -1.0, -GOLDEN],
    [0.0, 1.0, -GOLDEN],
    [GOLDEN, 0.0, -1.0],
    [GOLDEN, 0.0, 1.0],
    [-GOLDEN, 0.0, -1.0],
    [-GOLDEN, 0.0, 1.0],
])

ICOSAHEDRON_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def build_meshes(geometry: DomainGeometry, refinement: int) -> Tuple[SurfaceMesh, VolumeMesh]:
    if geometry.kind == GeometryKind.BALL:
        return build_ball_mesh(geometry.size, refinement, geometry.center)
    return build_cube_mesh(geometry.size, refinement, geometry.center)


def build_ball_mesh(radius: float, refinement: int, center=(0.0, 0.0, 0.0)) -> Tuple[SurfaceMesh, VolumeMesh]:
    """
    Icosphere surface plus radial layering of the ball.

    The surface is the icosahedron subdivided `refinement` times with vertices projected to the sphere.
    The volume uses 2^refinement layers: tetrahedra from the centre to the innermost scaled surface,
    then prisms between consecutive scaled surfaces, each split into 3 tetrahedra.
    """
    if radius <= 0:
        raise MeshError(f'Ball radius must be positive, got {radius}')
    if refinement < 0 or refinement > MAX_BALL_REFINEMENT:
        raise MeshError(f'Ball refinement must be in [0, {MAX_BALL_REFINEMENT}], got {refinement}')
    logging.info(f'Building ball mesh: radius={radius}, refinement={refinement}')

    unit, faces = _icosphere(refinement)
    c = np.asarray(center, dtype=float)
    surface_vertices = c + radius * unit
    surface = SurfaceMesh.from_panels(surface_vertices, faces)

    n_vertices = unit.shape[0]
    n_layers = 2 ** refinement
    layers = [c[None, :]]
    for k in range(1, n_layers):
        layers.append(c + (radius * (k / n_layers)) * unit)
    layers.append(surface_vertices)
    nodes = np.concatenate(layers, axis=0)

    def node(layer: int, vertex: np.ndarray) -> np.ndarray:
        return 1 + (layer - 1) * n_vertices + vertex

    ordered = np.sort(faces, axis=1)
    blocks = [np.column_stack([np.zeros(len(faces), dtype=np.int64), node(1, faces)])]
    for k in range(1, n_layers):
        b = node(k, ordered)
        t = node(k + 1, ordered)
        blocks.append(np.column_stack([b[:, 0], b[:, 1], b[:, 2], t[:, 0]]))
        blocks.append(np.column_stack([b[:, 1], b[:, 2], t[:, 0], t[:, 1]]))
        blocks.append(np.column_stack([b[:, 2], t[:, 0], t[:, 1], t[:, 2]]))
    cells = _positively_oriented(nodes, np.concatenate(blocks, axis=0))

    link = link_boundary_faces(cells, node(n_layers, faces))
    volume = VolumeMesh.from_cells(nodes, cells, link)
    logging.info(f'Ball mesh ready: {surface.n_panels} panels, {volume.n_cells} cells')
    return surface, volume


def build_cube_mesh(half_width: float, n: int, center=(0.0, 0.0, 0.0)) -> Tuple[SurfaceMesh, VolumeMesh]:
    """n^3 hexahedra, each split into 6 tetrahedra sharing the main diagonal."""
    if half_width <= 0:
        raise MeshError(f'Cube half-width must be positive, got {half_width}')
    if n < 1 or n > MAX_CUBE_DIVISIONS:
        raise MeshError(f'Cube divisions must be in [1, {MAX_CUBE_DIVISIONS}], got {n}')
    logging.info(f'Building cube mesh: half_width={half_width}, n={n}')

    c = np.asarray(center, dtype=float)
    ticks = np.linspace(-half_width, half_width, n + 1)
    grid = np.stack(np.meshgrid(ticks, ticks, ticks, indexing='ij'), axis=-1).reshape(-1, 3)
    nodes = c + grid

    def index(i, j, k):
        return (i * (n + 1) + j) * (n + 1) + k

    i, j, k = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing='ij'))
    blocks = []
    for perm in itertools.permutations(range(3)):
        path = [np.stack([i, j, k], axis=1)]
        for axis in perm:
            step = path[-1].copy()
            step[:, axis] += 1
            path.append(step)
        blocks.append(np.column_stack([index(*p.T) for p in path]))
    cells = _positively_oriented(nodes, np.concatenate(blocks, axis=0))

    faces, _ = boundary_faces(cells)
    used = np.unique(faces)
    remap = np.full(nodes.shape[0], -1, dtype=np.int64)
    remap[used] = np.arange(used.size)
    panels = remap[faces]
    surface_vertices = nodes[used]

    corners = surface_vertices[panels]
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    inward = np.einsum('ij,ij->i', cross, corners.mean(axis=1) - c) < 0
    panels[inward] = panels[inward][:, [0, 2, 1]]
    surface = SurfaceMesh.from_panels(surface_vertices, panels)

    link = link_boundary_faces(cells, used[panels])
    volume = VolumeMesh.from_cells(nodes, cells, link)
    logging.info(f'Cube mesh ready: {surface.n_panels} panels, {volume.n_cells} cells')
    return surface, volume


def boundary_faces(cells: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Faces owned by exactly one cell, as node triples, with their (cell, local face) owners."""
    local = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
    all_faces = cells[:, local].reshape(-1, 3)
    owners = np.column_stack([np.repeat(np.arange(cells.shape[0]), 4), np.tile(np.arange(4), cells.shape[0])])
    keys = np.sort(all_faces, axis=1)
    _, first, counts = np.unique(keys, axis=0, return_index=True, return_counts=True)
    single = np.sort(first[counts == 1])
    return all_faces[single], owners[single]


def link_boundary_faces(cells: np.ndarray, panel_nodes: np.ndarray) -> np.ndarray:
    faces, owners = boundary_faces(cells)
    lookup: Dict[Tuple[int, ...], int] = {tuple(sorted(p)): idx for idx, p in enumerate(panel_nodes.tolist())}
    if len(lookup) != faces.shape[0]:
        raise MeshError(f'{faces.shape[0]} boundary faces but {len(lookup)} surface panels')
    link = np.empty((faces.shape[0], 3), dtype=np.int64)
    for row, (face, owner) in enumerate(zip(faces.tolist(), owners.tolist())):
        panel = lookup.get(tuple(sorted(face)))
        if panel is None:
            raise MeshError(f'Boundary face {face} of cell {owner[0]} has no matching surface panel')
        link[row] = (owner[0], owner[1], panel)
    return link[np.argsort(link[:, 2])]


def _icosphere(refinement: int) -> Tuple[np.ndarray, np.ndarray]:
    vertices = [v / np.linalg.norm(v) for v in ICOSAHEDRON_VERTICES]
    faces = ICOSAHEDRON_FACES.copy()
    for _ in range(refinement):
        midpoints: Dict[Tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in midpoints:
                m = vertices[a] + vertices[b]
                vertices.append(m / np.linalg.norm(m))
                midpoints[key] = len(vertices) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces.tolist():
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
        faces = np.array(refined, dtype=np.int64)
    points = np.array(vertices)

    corners = points[faces]
    cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    inward = np.einsum('ij,ij->i', cross, corners.mean(axis=1)) < 0
    faces[inward] = faces[inward][:, [0, 2, 1]]
    return points, faces


def _positively_oriented(nodes: np.ndarray, cells: np.ndarray) -> np.ndarray:
    cells = cells.astype(np.int64).copy()
    negative = signed_volumes(nodes[cells]) < 0
    cells[negative] = cells[negative][:, [1, 0, 2, 3]]
    return cells
