import math

import numpy as np
import pytest

from app.engine.coefficient.schemas import CoefficientField
from app.engine.kernels.evaluate import (
    conormal_x_kernel,
    conormal_y_kernel,
    evaluate,
    kernel_factors,
    laplace_fundamental,
    laplace_gradient_x,
    parametrix_x,
    parametrix_y,
    remainder_x,
    remainder_y,
)
from app.engine.kernels.schemas import KernelId
from app.exceptions.singularity_error import SingularityError

ORIGIN = np.zeros(3)
E1 = np.array([1.0, 0.0, 0.0])


def test_laplace_fundamental_values():
    assert laplace_fundamental(ORIGIN, E1) == pytest.approx(-1.0 / (4.0 * math.pi))
    assert laplace_fundamental(ORIGIN, 2.0 * E1) == pytest.approx(-1.0 / (8.0 * math.pi))


def test_laplace_fundamental_decays():
    distances = np.array([1.0, 2.0, 4.0, 8.0])
    values = laplace_fundamental(distances[:, None] * E1, ORIGIN)

    assert np.all(np.diff(values) > 0.0)
    assert np.all(values < 0.0)


def test_coincident_points_raise():
    with pytest.raises(SingularityError):
        laplace_fundamental(E1, E1)
    with pytest.raises(SingularityError):
        laplace_gradient_x(E1, E1)


def test_laplace_gradient_matches_finite_differences():
    x = np.array([0.4, -0.3, 0.8])
    y = np.array([-0.1, 0.2, 0.1])
    step = 1e-6
    fd = np.array([
        (laplace_fundamental(x + step * e, y) - laplace_fundamental(x - step * e, y)) / (2.0 * step)
        for e in np.eye(3)
    ])

    assert laplace_gradient_x(E1, ORIGIN) == pytest.approx([1.0 / (4.0 * math.pi), 0.0, 0.0])
    assert np.linalg.norm(laplace_gradient_x(2.0 * E1, ORIGIN)) == pytest.approx(1.0 / (16.0 * math.pi))
    assert np.allclose(laplace_gradient_x(x, y), fd, atol=1e-8)
    assert np.allclose(laplace_gradient_x(x, y), -laplace_gradient_x(y, x))


def test_parametrices(quadratic_field):
    two = CoefficientField.constant(2.0)

    assert parametrix_x(ORIGIN, E1, two) == pytest.approx(-1.0 / (8.0 * math.pi))
    assert parametrix_x(E1, ORIGIN, quadratic_field) == pytest.approx(-1.0 / (8.0 * math.pi))
    assert parametrix_y(ORIGIN, E1, quadratic_field) == pytest.approx(-1.0 / (8.0 * math.pi))


def test_parametrices_share_laplace_part(quadratic_field):
    rng = np.random.default_rng(3)
    x = rng.uniform(-1.0, 1.0, size=(20, 3))
    y = rng.uniform(-1.0, 1.0, size=(20, 3)) + 3.0

    left = parametrix_x(x, y, quadratic_field) * quadratic_field.eval(x)
    right = parametrix_y(x, y, quadratic_field) * quadratic_field.eval(y)

    assert np.allclose(left, right, rtol=1e-14, atol=0.0)


def test_constant_coefficient_collapses_to_laplace():
    unit = CoefficientField.constant(1.0)
    rng = np.random.default_rng(5)
    x = rng.uniform(-1.0, 1.0, size=(10, 3))
    y = x + rng.uniform(0.1, 1.0, size=(10, 3))

    assert np.array_equal(parametrix_x(x, y, unit), laplace_fundamental(x, y))
    assert np.array_equal(parametrix_y(x, y, unit), laplace_fundamental(x, y))
    assert np.all(remainder_x(x, y, unit) == 0.0)
    assert np.all(remainder_y(x, y, unit) == 0.0)


def test_remainder_examples(exponential_field):
    assert remainder_x(ORIGIN, E1, exponential_field) == pytest.approx(1.0 / (4.0 * math.pi))
    assert remainder_y(ORIGIN, E1, exponential_field) == pytest.approx(-1.0 / (4.0 * math.pi * math.e))


def test_remainder_singularity_is_second_order(exponential_field):
    y = np.array([0.1, 0.2, -0.1])
    radii = 10.0 ** -np.arange(2, 7)

    scaled = [abs(remainder_x(y + r * E1, y, exponential_field)) * r * r for r in radii]

    assert max(scaled) < 1.0
    assert scaled[-1] == pytest.approx(scaled[-2], rel=1e-3)


def test_conormal_kernels(exponential_field):
    unit = CoefficientField.constant(1.0)
    x = np.array([0.3, 0.1, -0.2])
    n = np.array([0.0, 0.6, 0.8])

    assert conormal_x_kernel(E1, E1, ORIGIN, exponential_field) == pytest.approx(1.0 / (2.0 * math.pi))
    assert conormal_x_kernel(x, n, ORIGIN, unit) == pytest.approx(float(n @ laplace_gradient_x(x, ORIGIN)))
    assert conormal_y_kernel(x, ORIGIN, n, unit) == pytest.approx(-float(n @ laplace_gradient_x(x, ORIGIN)))


def test_evaluate_requires_normals(quadratic_field):
    with pytest.raises(ValueError):
        evaluate(KernelId.CONORMAL_X, E1, ORIGIN, quadratic_field)
    with pytest.raises(ValueError):
        evaluate(KernelId.CONORMAL_Y, E1, ORIGIN, quadratic_field)


@pytest.mark.parametrize('kernel', list(KernelId))
def test_split_form_reproduces_kernel(kernel, quadratic_field):
    rng = np.random.default_rng(11)
    x = rng.uniform(-1.0, 1.0, size=(8, 3))
    y = rng.uniform(-1.0, 1.0, size=(8, 3)) + 2.5
    n_x = rng.normal(size=(8, 3))
    n_x /= np.linalg.norm(n_x, axis=1, keepdims=True)
    n_y = rng.normal(size=(8, 3))
    n_y /= np.linalg.norm(n_y, axis=1, keepdims=True)

    s, g = kernel_factors(kernel, x, y, quadratic_field, n_x, n_y)
    d = x - y
    r = np.linalg.norm(d, axis=1)
    split = np.zeros(8)
    if s is not None:
        split = split + s / (4.0 * math.pi * r)
    if g is not None:
        split = split + np.sum(g * d, axis=1) / (4.0 * math.pi * r ** 3)

    assert np.allclose(split, evaluate(kernel, x, y, quadratic_field, n_x, n_y), rtol=1e-12, atol=1e-15)
