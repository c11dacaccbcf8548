"""
Integrands of the Laplace-relation assembly path.

Each class writes an operator through harmonic kernels and coefficient weights on the density,
e.g. V rho = V_lap(rho / a). They share quadrature points with the direct kernels, so both paths
differ only by rounding.
"""
from dataclasses import dataclass

import numpy as np

from app.engine.coefficient.schemas import CoefficientField
from app.engine.kernels.evaluate import kernel_factors
from app.engine.kernels.schemas import KernelId
from app.engine.potentials.schemas import AssemblyPath, OperatorId, ParametrixKind
from app.engine.quadrature.integrands import Factors, Integrand, KernelIntegrand


def _laplace_scalar(x) -> np.ndarray:
    s, _ = kernel_factors(KernelId.LAPLACE, x, x, CoefficientField.constant())
    return s


@dataclass(frozen=True)
class SingleLayerRelation:
    """V rho = V_lap(rho / a); also the volume potential P rho = P_lap(rho / a)."""
    field: CoefficientField
    name: str = 'single_layer_relation'
    needs_source_normal: bool = False
    vanishes_in_plane: bool = True

    def factors(self, x, y, n_x=None, n_y=None) -> Factors:
        return _laplace_scalar(x) * (1.0 / self.field.eval(x)), None


@dataclass(frozen=True)
class DoubleLayerRelation:
    """W rho = W_lap rho - V_lap(rho d(ln a)/dn)."""
    field: CoefficientField
    name: str = 'double_layer_relation'
    needs_source_normal: bool = True
    vanishes_in_plane: bool = True

    def factors(self, x, y, n_x=None, n_y=None) -> Factors:
        n_x = np.asarray(n_x, dtype=float)
        if self.field.is_constant:
            return None, n_x
        normal_log = np.sum(n_x * self.field.grad_log(x), axis=-1)
        return -(_laplace_scalar(x) * normal_log), n_x


@dataclass(frozen=True)
class AdjointRelation:
    """W' rho = a W'_lap(rho / a), the kernel being the conormal derivative in y."""
    field: CoefficientField
    name: str = 'adjoint_relation'
    needs_source_normal: bool = False
    vanishes_in_plane: bool = True

    def factors(self, x, y, n_x=None, n_y=None) -> Factors:
        n_y = np.asarray(n_y, dtype=float)
        weight = self.field.eval(y) * (1.0 / self.field.eval(x))
        return None, weight[..., None] * -n_y


@dataclass(frozen=True)
class RemainderRelation:
    """R rho = div_y P_lap(rho grad ln a) - P_lap(rho lap ln a), using grad_y P_lap = -grad_x P_lap."""
    field: CoefficientField
    name: str = 'remainder_relation'
    needs_source_normal: bool = False
    vanishes_in_plane: bool = False

    def factors(self, x, y, n_x=None, n_y=None) -> Factors:
        if self.field.is_constant:
            return None, None
        return -(_laplace_scalar(x) * self.field.laplacian_log(x)), -self.field.grad_log(x)


@dataclass(frozen=True)
class HarmonicAdjoint:
    """Conormal derivative in y of the Laplace fundamental solution, coded independently of the parametrix."""
    name: str = 'harmonic_adjoint'
    needs_source_normal: bool = False
    vanishes_in_plane: bool = True

    def factors(self, x, y, n_x=None, n_y=None) -> Factors:
        return None, -np.asarray(n_y, dtype=float)


DIRECT_KERNELS = {
    (OperatorId.V, ParametrixKind.X): KernelId.PARAMETRIX_X,
    (OperatorId.V, ParametrixKind.Y): KernelId.PARAMETRIX_Y,
    (OperatorId.W, ParametrixKind.X): KernelId.CONORMAL_X,
    (OperatorId.CAL_W_PRIME, ParametrixKind.X): KernelId.CONORMAL_Y,
    (OperatorId.P, ParametrixKind.X): KernelId.PARAMETRIX_X,
    (OperatorId.P, ParametrixKind.Y): KernelId.PARAMETRIX_Y,
    (OperatorId.R, ParametrixKind.X): KernelId.REMAINDER_X,
    (OperatorId.R, ParametrixKind.Y): KernelId.REMAINDER_Y,
}

RELATIONS = {
    OperatorId.V: SingleLayerRelation,
    OperatorId.W: DoubleLayerRelation,
    OperatorId.CAL_W_PRIME: AdjointRelation,
    OperatorId.P: SingleLayerRelation,
    OperatorId.R: RemainderRelation,
}


def integrand_for(
    operator: OperatorId,
    field: CoefficientField,
    path: AssemblyPath,
    parametrix: ParametrixKind = ParametrixKind.X,
) -> Integrand:
    """operator is the family (V, W, calWprime, P, R); calV and calW share the integrands of V and W."""
    if path == AssemblyPath.DIRECT:
        kernel = DIRECT_KERNELS.get((operator, parametrix))
        if kernel is None:
            raise ValueError(f'no {parametrix.value}-parametrix kernel for operator {operator.value}')
        return KernelIntegrand(kernel, field)
    if parametrix != ParametrixKind.X:
        raise ValueError('the relation path is only available for the x-parametrix')
    return RELATIONS[operator](field)
