"""
Numerical checks of the kernel identities, jump relations and operator relations.

Every check returns IdentityResult rows; a check that raises is recorded as a failed row so the
report is always complete. Checks that are only meaningful for the Laplace operator run with a = 1
whatever the coefficient under test.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel
from scipy.linalg import eigvalsh, svdvals

from app.engine.bdie.solve import estimate_condition
from app.engine.coefficient.positivity import require_positive
from app.engine.coefficient.schemas import CoefficientField
from app.engine.kernels.evaluate import FOUR_PI, laplace_fundamental, parametrix_x, remainder_x
from app.engine.kernels.schemas import KernelId
from app.engine.mesh.builders import build_meshes
from app.engine.mesh.schemas import DomainGeometry, GeometryKind, SurfaceMesh, VolumeMesh
from app.engine.potentials.assembly import surface_rows, volume_rows
from app.engine.potentials.relations import HarmonicAdjoint, integrand_for
from app.engine.potentials.schemas import AssemblyPath, OperatorId, PotentialMatrix, TargetSet
from app.engine.potentials.surface import (
    assemble_calV,
    assemble_calW,
    assemble_calWprime,
    assemble_V,
    assemble_W,
    trace_double_layer,
)
from app.engine.potentials.volume import assemble_P, assemble_R
from app.engine.quadrature.integrands import KernelIntegrand
from app.engine.quadrature.schemas import SingularPolicy
from app.engine.verification.cases import apply_operator_fd
from app.engine.verification.probes import interior_probes, spread_subset
from app.exceptions.bdie_error import BdieError

LAPLACE_FIELD = CoefficientField.constant(1.0)
SUBSET_TARGETS = 256
INTERIOR_PROBES = 10
KERNEL_PAIRS = 200
APPROACH_DIRECTIONS = 20
JUMP_OFFSETS = (0.2, 0.1)  # multiples of h
DEFECT_STEP = 1e-4  # relative to |x - y|
DIVERGENCE_STEP = 1e-5


class Comparison(str, Enum):
    AT_MOST = '<='
    ABOVE = '>'


class IdentityResult(BaseModel):
    identity: str
    measured: float
    threshold: float
    comparison: Comparison = Comparison.AT_MOST
    passed: bool
    detail: str = ''

    class Config:
        allow_mutation = False


class IdentityReport(BaseModel):
    geometry: str
    coefficient: str
    refinement: int
    results: List[IdentityResult]

    class Config:
        allow_mutation = False

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[IdentityResult]:
        return [result for result in self.results if not result.passed]


def result(
    identity: str,
    measured: float,
    threshold: float,
    comparison: Comparison = Comparison.AT_MOST,
    detail: str = '',
) -> IdentityResult:
    measured = float(measured)
    if not math.isfinite(measured):
        passed = False
    elif comparison == Comparison.AT_MOST:
        passed = measured <= threshold
    else:
        passed = measured > threshold
    level = logging.INFO if passed else logging.WARNING
    logging.log(level, f'Identity {identity}: {measured:.3e} {comparison.value} {threshold:g} -> {passed}')
    return IdentityResult(
        identity=identity,
        measured=measured,
        threshold=threshold,
        comparison=comparison,
        passed=passed,
        detail=detail,
    )


def relative_discrepancy(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.max(np.abs(b))) if b.size else 0.0
    difference = float(np.max(np.abs(a - b))) if a.size else 0.0
    return difference / scale if scale > 0.0 else difference


@dataclass(frozen=True)
class SuiteContext:
    geometry: DomainGeometry
    field: CoefficientField
    surface: SurfaceMesh
    volume: VolumeMesh
    policy: SingularPolicy
    seed: int = 0

    @property
    def h(self) -> float:
        return float(self.surface.diameters.max())

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def probes(self) -> TargetSet:
        return TargetSet.from_points(interior_probes(self.geometry, INTERIOR_PROBES, seed=self.seed), label='probes')

    def barycenter_subset(self) -> TargetSet:
        cells = spread_subset(np.arange(self.volume.n_cells), SUBSET_TARGETS)
        return TargetSet.barycenters(self.volume, cells)

    def offset_targets(self, scale: float, normals: bool = False) -> TargetSet:
        """Centroids moved scale * h along the outward normal (negative scale: inside)."""
        points = self.surface.centroids + scale * self.h * self.surface.normals
        return TargetSet.from_points(points, self.surface.normals if normals else None, label=f'offset {scale:+g}h')


def _extrapolate(values: Callable[[float], np.ndarray], side: float) -> np.ndarray:
    """Linear Richardson extrapolation of a one-sided limit from offsets 0.2h and 0.1h."""
    far, near = (values(side * offset) for offset in JUMP_OFFSETS)
    return 2.0 * near - far


def check_gauss(ctx: SuiteContext) -> List[IdentityResult]:
    ones = np.ones(ctx.surface.n_panels)
    calW = assemble_calW(ctx.surface, LAPLACE_FIELD, ctx.policy)
    trace = trace_double_layer(calW) @ ones
    interior = assemble_W(ctx.surface, ctx.probes(), LAPLACE_FIELD, ctx.policy).values @ ones
    conormal = KernelIntegrand(KernelId.LAPLACE_CONORMAL, LAPLACE_FIELD)
    solid = surface_rows(ctx.surface, ctx.probes(), conormal, ctx.policy)
    return [
        result('gauss_double_layer_trace', np.max(np.abs(trace + 1.0)), 2e-2, detail='a=1, |gamma W[1] + 1|'),
        result('gauss_double_layer_interior', np.max(np.abs(interior + 1.0)), 2e-2, detail='a=1, |W[1](y) + 1|'),
        result('solid_angle', np.max(np.abs(solid.sum(axis=1) - 1.0)), 1e-3, detail='a=1, conormal kernel summed'),
    ]


def check_double_layer_jump(ctx: SuiteContext) -> List[IdentityResult]:
    phi = ctx.surface.centroids[:, 0]
    calW = assemble_calW(ctx.surface, ctx.field, ctx.policy)
    expected = trace_double_layer(calW) @ phi

    def inside(scale: float) -> np.ndarray:
        return assemble_W(ctx.surface, ctx.offset_targets(scale), ctx.field, ctx.policy).values @ phi

    limit = _extrapolate(inside, -1.0)
    return [result('double_layer_jump', np.max(np.abs(limit - expected)), 5e-2, detail='phi = x1, calW - I/2')]


def check_single_layer_continuity(ctx: SuiteContext) -> List[IdentityResult]:
    ones = np.ones(ctx.surface.n_panels)

    def potential(scale: float) -> np.ndarray:
        return assemble_V(ctx.surface, ctx.offset_targets(scale), ctx.field, ctx.policy).values @ ones

    inner = _extrapolate(potential, -1.0)
    outer = _extrapolate(potential, 1.0)
    direct = assemble_calV(ctx.surface, ctx.field, ctx.policy).values @ ones
    return [
        result('single_layer_continuity', np.max(np.abs(inner - outer)), 5e-2, detail='psi = 1'),
        result('single_layer_trace', np.max(np.abs(inner - direct)), 5e-2, detail='psi = 1, against calV'),
    ]


def check_conormal_jump(ctx: SuiteContext) -> List[IdentityResult]:
    ones = np.ones(ctx.surface.n_panels)
    integrand = integrand_for(OperatorId.CAL_W_PRIME, LAPLACE_FIELD, AssemblyPath.DIRECT)

    def flux(scale: float) -> np.ndarray:
        targets = ctx.offset_targets(scale, normals=True)
        return -surface_rows(ctx.surface, targets, integrand, ctx.policy, needs_target_normals=True) @ ones

    limit = _extrapolate(flux, -1.0)
    expected = 0.5 * ones + assemble_calWprime(ctx.surface, LAPLACE_FIELD, ctx.policy).values @ ones
    return [result('conormal_jump', np.max(np.abs(limit - expected)), 1e-1, detail='a=1, psi = 1, psi/2 + calW\'')]


def _path_pairs(ctx: SuiteContext, field: CoefficientField):
    surface, volume, policy = ctx.surface, ctx.volume, ctx.policy
    cells = ctx.barycenter_subset()
    yield 'V', lambda path: assemble_V(surface, cells, field, policy, path)
    yield 'W', lambda path: assemble_W(surface, cells, field, policy, path)
    yield 'calV', lambda path: assemble_calV(surface, field, policy, path)
    yield 'calW', lambda path: assemble_calW(surface, field, policy, path)
    yield 'calWprime', lambda path: assemble_calWprime(surface, field, policy, path)
    yield 'P', lambda path: assemble_P(volume, cells, field, policy, path)
    yield 'R', lambda path: assemble_R(volume, cells, field, policy, path)


def check_path_equivalence(ctx: SuiteContext) -> List[IdentityResult]:
    rows = []
    for name, assemble in _path_pairs(ctx, ctx.field):
        direct: PotentialMatrix = assemble(AssemblyPath.DIRECT)
        relation: PotentialMatrix = assemble(AssemblyPath.RELATION)
        rows.append(result(f'path_equivalence_{name}', relative_discrepancy(relation.values, direct.values), 1e-12))
    return rows


def check_laplace_reduction(ctx: SuiteContext) -> List[IdentityResult]:
    surface, volume, policy = ctx.surface, ctx.volume, ctx.policy
    cells = ctx.barycenter_subset()
    centroids = TargetSet.centroids(surface)
    laplace = KernelIntegrand(KernelId.LAPLACE, LAPLACE_FIELD)
    conormal = KernelIntegrand(KernelId.LAPLACE_CONORMAL, LAPLACE_FIELD)
    pairs = [
        ('V', assemble_V(surface, cells, LAPLACE_FIELD, policy).values, -surface_rows(surface, cells, laplace, policy)),
        (
            'W',
            assemble_W(surface, cells, LAPLACE_FIELD, policy).values,
            -surface_rows(surface, cells, conormal, policy),
        ),
        (
            'calV',
            assemble_calV(surface, LAPLACE_FIELD, policy).values,
            -surface_rows(surface, centroids, laplace, policy),
        ),
        (
            'calW',
            assemble_calW(surface, LAPLACE_FIELD, policy).values,
            -surface_rows(surface, centroids, conormal, policy),
        ),
        (
            'calWprime',
            assemble_calWprime(surface, LAPLACE_FIELD, policy).values,
            -surface_rows(surface, centroids, HarmonicAdjoint(), policy, needs_target_normals=True),
        ),
        ('P', assemble_P(volume, cells, LAPLACE_FIELD, policy).values, volume_rows(volume, cells, laplace, policy)),
    ]
    rows = [result(f'laplace_reduction_{name}', relative_discrepancy(a, b), 1e-14) for name, a, b in pairs]
    remainder = assemble_R(volume, cells, LAPLACE_FIELD, policy).values
    rows.append(result('laplace_reduction_R', np.max(np.abs(remainder)), 0.0, detail='R = 0 exactly'))
    return rows


def sample_pairs(ctx: SuiteContext, n: int, salt: int, r_min: float = 0.1, r_max: float = 2.0):
    """n reproducible (x, y) pairs in the bounding box with r_min <= |x - y| <= r_max."""
    rng = ctx.rng(salt)
    box = ctx.geometry.bounding_box()
    lower, upper = np.asarray(box.lower), np.asarray(box.upper)
    xs, ys = [], []
    count = 0
    while count < n:
        x = rng.uniform(lower, upper, size=(4 * n, 3))
        y = rng.uniform(lower, upper, size=(4 * n, 3))
        r = np.linalg.norm(x - y, axis=1)
        keep = (r >= r_min) & (r <= r_max)
        xs.append(x[keep])
        ys.append(y[keep])
        count += int(keep.sum())
    return np.concatenate(xs)[:n], np.concatenate(ys)[:n]


def check_defect_identity(ctx: SuiteContext) -> List[IdentityResult]:
    """
    div_x(a grad_x P(x, y)) by finite differences against R(x, y) off the diagonal.

    Errors are relative to the size of the two remainder terms; for constant a, where both vanish,
    relative to the second derivatives of P.
    """
    field = ctx.field
    x, y = sample_pairs(ctx, KERNEL_PAIRS, salt=1)
    r = np.linalg.norm(x - y, axis=1)
    defect = apply_operator_fd(field, lambda p: parametrix_x(p, y, field), x, DEFECT_STEP * r)
    expected = remainder_x(x, y, field)
    scale = (
        np.abs(field.laplacian_log(x)) / (FOUR_PI * r)
        + np.linalg.norm(field.grad_log(x), axis=1) / (FOUR_PI * r ** 2)
    )
    scale = np.where(scale > 0.0, scale, 1.0 / (FOUR_PI * r ** 3))
    return [result('defect_identity', np.max(np.abs(defect - expected) / scale), 1e-4, detail=f'{KERNEL_PAIRS} pairs')]


def check_expansion_vs_divergence(ctx: SuiteContext) -> List[IdentityResult]:
    """Expanded remainder against -div_x(grad ln a(x) P_lap(x - y)) by central differences."""
    field = ctx.field
    x, y = sample_pairs(ctx, KERNEL_PAIRS, salt=2)
    divergence = np.zeros(x.shape[0])
    for i in range(3):
        e = np.zeros(3)
        e[i] = DIVERGENCE_STEP
        forward = field.grad_log(x + e)[:, i] * laplace_fundamental(x + e, y)
        backward = field.grad_log(x - e)[:, i] * laplace_fundamental(x - e, y)
        divergence += (forward - backward) / (2.0 * DIVERGENCE_STEP)
    error = np.max(np.abs(remainder_x(x, y, field) + divergence))
    return [result('expansion_vs_divergence', error, 1e-6, detail=f'{KERNEL_PAIRS} pairs, absolute')]


def _approach_directions(n: int) -> np.ndarray:
    """Fibonacci sphere."""
    k = np.arange(n) + 0.5
    polar = np.arccos(1.0 - 2.0 * k / n)
    azimuth = math.pi * (1.0 + math.sqrt(5.0)) * k
    return np.stack([np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)], axis=1)


def check_singular_orders(ctx: SuiteContext) -> List[IdentityResult]:
    """|P| r and |R| r^2 settle to finite limits as x approaches y along each direction."""
    field = ctx.field
    y = np.asarray(ctx.geometry.center) + 0.3 * ctx.geometry.size * np.ones(3) / math.sqrt(3.0)
    directions = _approach_directions(APPROACH_DIRECTIONS)
    radii = 10.0 ** -np.arange(1, 7)
    scaled_p, scaled_r = [], []
    for radius in radii:
        x = y + radius * directions
        scaled_p.append(np.abs(parametrix_x(x, y, field)) * radius)
        scaled_r.append(np.abs(remainder_x(x, y, field)) * radius ** 2)
    rows = []
    for name, scaled in (('singular_order_P', np.array(scaled_p)), ('singular_order_R', np.array(scaled_r))):
        peak = float(np.max(scaled))
        drift = float(np.max(np.abs(scaled[-1] - scaled[-2])))
        rows.append(result(name, drift / peak if peak > 0.0 else drift, 1e-3, detail=f'max scaled value {peak:.4g}'))
    return rows


def check_ball_oracles(ctx: SuiteContext) -> List[IdentityResult]:
    if ctx.geometry.kind != GeometryKind.BALL:
        logging.info('Analytic potential oracles only exist for the ball; skipped')
        return []
    radius = ctx.geometry.size
    center = np.asarray(ctx.geometry.center)
    origin = TargetSet.from_points(center[None, :], label='center')
    centroids = TargetSet.centroids(ctx.surface)
    ones_panels = np.ones(ctx.surface.n_panels)
    ones_cells = np.ones(ctx.volume.n_cells)

    single = assemble_V(ctx.surface, origin, LAPLACE_FIELD, ctx.policy).values @ ones_panels
    volume_center = assemble_P(ctx.volume, origin, LAPLACE_FIELD, ctx.policy).values @ ones_cells
    volume_boundary = assemble_P(ctx.volume, centroids, LAPLACE_FIELD, ctx.policy).values @ ones_cells
    return [
        result('oracle_single_layer_center', abs(single[0] - radius) / radius, 2e-2, detail='V[1](0) = R'),
        result(
            'oracle_volume_center',
            abs(volume_center[0] + 0.5 * radius ** 2) / radius ** 2,
            2e-2,
            detail='P[1](0) = -R^2/2',
        ),
        result(
            'oracle_volume_boundary',
            np.max(np.abs(volume_boundary + radius ** 2 / 3.0)) / radius ** 2,
            2e-2,
            detail='P[1](y) = -R^2/3 on the boundary',
        ),
    ]


def check_single_layer_injectivity(ctx: SuiteContext) -> List[IdentityResult]:
    calV = assemble_calV(ctx.surface, ctx.field, ctx.policy).values
    smallest = float(svdvals(calV).min())
    reciprocal_condition = 1.0 / estimate_condition(calV)
    laplace = assemble_calV(ctx.surface, LAPLACE_FIELD, ctx.policy).values
    lumped = ctx.surface.areas[:, None] * laplace
    rayleigh = float(eigvalsh(0.5 * (lumped + lumped.T)).min())
    return [
        result('single_layer_min_singular_value', smallest, 0.0, Comparison.ABOVE),
        result(
            'single_layer_reciprocal_condition',
            reciprocal_condition,
            calV.shape[0] * np.finfo(float).eps,
            Comparison.ABOVE,
            detail='LAPACK gecon, 1-norm',
        ),
        result('single_layer_positivity', rayleigh, 0.0, Comparison.ABOVE, detail='a=1, area-lumped symmetric part'),
    ]


CHECKS = (
    check_gauss,
    check_double_layer_jump,
    check_single_layer_continuity,
    check_conormal_jump,
    check_path_equivalence,
    check_laplace_reduction,
    check_defect_identity,
    check_expansion_vs_divergence,
    check_singular_orders,
    check_ball_oracles,
    check_single_layer_injectivity,
)


def identity_suite(
    geometry: DomainGeometry,
    field: CoefficientField,
    refinement: int,
    policy: Optional[SingularPolicy] = None,
    seed: int = 0,
) -> IdentityReport:
    require_positive(field, geometry.bounding_box())
    surface, volume = build_meshes(geometry, refinement)
    ctx = SuiteContext(geometry, field, surface, volume, policy or SingularPolicy(), seed)
    logging.info(f'Identity suite on {geometry.kind.value} refinement {refinement}, a={field.describe()}')
    results: List[IdentityResult] = []
    for check in CHECKS:
        try:
            results.extend(check(ctx))
        except BdieError as e:
            logging.error(f'{check.__name__} raised: {e.message}')
            results.append(result(check.__name__.replace('check_', ''), float('nan'), 0.0, detail=e.message))
    report = IdentityReport(
        geometry=f'{geometry.kind.value}({geometry.size!r})',
        coefficient=field.describe(),
        refinement=refinement,
        results=results,
    )
    logging.info(f'Identity suite: {len(report.failures)} of {len(results)} identities failed')
    return report
