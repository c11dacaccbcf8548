import math

import numpy as np
import pytest

from app.engine.coefficient.schemas import CoefficientField
from app.engine.mesh.builders import build_ball_mesh
from app.engine.verification.cases import ManufacturedCase, apply_operator_fd, builtin_cases, check_case, get_case
from app.engine.verification.convergence import estimate_orders
from app.engine.verification.probes import spread_subset
from app.exceptions.config_error import ConfigError


@pytest.fixture(scope='module')
def ball():
    return build_ball_mesh(1.0, 0)


def test_builtin_cases_are_consistent():
    for case in builtin_cases():
        assert check_case(case) <= 1e-6


def test_case_right_hand_sides():
    c3 = get_case('C3')
    c4 = get_case('c4')

    assert float(c3.f(np.array([0.3, 0.0, 0.0]))) == pytest.approx(0.6)
    assert float(c4.f(np.array([0.0, 0.0, 0.0]))) == pytest.approx(2.0)
    assert float(c4.field.eval([1.0, 0.0, 0.0])) == pytest.approx(math.e)


def test_only_the_constant_case_is_exact():
    assert [case.name for case in builtin_cases() if case.exact] == ['C1']


def test_unknown_case():
    with pytest.raises(ConfigError):
        get_case('C9')


def test_inconsistent_case_is_rejected():
    wrong = ManufacturedCase(
        name='wrong',
        description='u = x1^2 with a = 1 but f = 0',
        field=CoefficientField.constant(1.0),
        u=lambda p: np.asarray(p)[..., 0] ** 2,
        grad_u=lambda p: np.zeros(np.shape(p)),
        f=lambda p: np.zeros(np.shape(p)[:-1]),
    )

    with pytest.raises(ConfigError):
        check_case(wrong)


def test_finite_difference_operator_on_quadratic():
    points = np.array([[0.1, 0.2, 0.3], [-0.4, 0.0, 0.5]])

    laplacian = apply_operator_fd(CoefficientField.constant(2.0), lambda p: np.sum(p * p, axis=-1), points, 1e-3)

    assert laplacian == pytest.approx([12.0, 12.0], rel=1e-6)


def test_sampled_data(ball):
    surface, volume = ball
    c2 = get_case('C2')

    assert np.array_equal(c2.trace(surface).values, surface.centroids[:, 0])
    assert np.allclose(c2.conormal(surface).values, surface.normals[:, 0])
    assert np.array_equal(c2.u_cells(volume).values, volume.barycenters[:, 0])
    assert c2.rhs(volume).is_zero


def test_estimate_orders():
    h = [1.0, 0.5, 0.25]

    orders = estimate_orders(h, [1.0, 0.25, 0.0625])

    assert orders[0] is None
    assert orders[1] == pytest.approx(2.0)
    assert orders[2] == pytest.approx(2.0)
    assert estimate_orders(h, [1.0, None, 0.5]) == [None, None, None]
    assert estimate_orders([1.0], [0.1]) == [None]


def test_spread_subset():
    indices = np.arange(1000)

    subset = spread_subset(indices, 10)

    assert subset.size == 10
    assert subset[0] == 0
    assert subset[-1] == 999
    assert np.array_equal(spread_subset(indices[:5], 10), indices[:5])
