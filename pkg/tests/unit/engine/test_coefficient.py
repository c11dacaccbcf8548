import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.engine.coefficient.positivity import check_positivity, require_positive
from app.engine.coefficient.schemas import BoundingBox, CoefficientFamily, CoefficientField
from app.exceptions.coefficient_error import CoefficientError


@pytest.fixture(scope='module')
def unit_box():
    return BoundingBox.cube(1.0)


def test_eval_examples(quadratic_field, exponential_field):
    constant = CoefficientField.constant(2.0)

    assert constant.eval([1.0, 2.0, 3.0]) == 2.0
    assert quadratic_field.eval([1.0, 0.0, 0.0]) == pytest.approx(2.0)
    assert exponential_field.eval([1.0, 0.0, 0.0]) == pytest.approx(math.e)


def test_eval_accepts_point_arrays():
    field = CoefficientField(family=CoefficientFamily.LINEAR, params=(1.0, 0.1, 0.2, 0.3))
    points = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]])

    values = field.eval(points)

    assert values.shape == (2,)
    assert values == pytest.approx([1.0, 2.4])


def test_eval_rejects_wrong_point_shape():
    with pytest.raises(CoefficientError):
        CoefficientField.constant(1.0).eval([1.0, 2.0])


def test_grad_log_examples(quadratic_field, exponential_field):
    assert np.all(CoefficientField.constant(3.0).grad_log([0.4, 0.1, -0.2]) == 0.0)
    assert exponential_field.grad_log([0.3, -0.7, 0.2]) == pytest.approx([1.0, 0.0, 0.0])
    assert quadratic_field.grad_log([1.0, 0.0, 0.0]) == pytest.approx([1.0, 0.0, 0.0])


def test_laplacian_log_examples(quadratic_field, exponential_field):
    assert CoefficientField.constant(3.0).laplacian_log([0.4, 0.1, -0.2]) == 0.0
    assert exponential_field.laplacian_log([0.4, 0.1, -0.2]) == 0.0
    assert quadratic_field.laplacian_log([0.0, 0.0, 0.0]) == pytest.approx(6.0)


@pytest.mark.parametrize('field', [
    CoefficientField(family=CoefficientFamily.LINEAR, params=(2.0, 0.3, -0.2, 0.1)),
    CoefficientField(family=CoefficientFamily.QUADRATIC, params=(1.0, 1.0, 0.5, 2.0)),
    CoefficientField(family=CoefficientFamily.EXPONENTIAL, params=(0.5, -0.3, 0.2)),
])
def test_log_derivatives_match_finite_differences(field):
    x = np.array([0.3, -0.2, 0.4])
    step = 1e-4
    eye = np.eye(3)

    gradient = np.array([
        (math.log(field.eval(x + step * e)) - math.log(field.eval(x - step * e))) / (2.0 * step) for e in eye
    ])
    laplacian = sum(
        (field.grad_log(x + step * e)[i] - field.grad_log(x - step * e)[i]) / (2.0 * step)
        for i, e in enumerate(eye)
    )

    assert field.grad_log(x) == pytest.approx(gradient, abs=1e-7)
    assert field.laplacian_log(x) == pytest.approx(laplacian, abs=1e-6)


def test_parameter_count_is_validated():
    with pytest.raises(ValidationError):
        CoefficientField(family=CoefficientFamily.LINEAR, params=(1.0, 2.0))


def test_non_finite_parameters_are_rejected():
    with pytest.raises(ValidationError):
        CoefficientField(family=CoefficientFamily.CONSTANT, params=(float('nan'),))


def test_field_is_immutable():
    field = CoefficientField.constant(1.0)

    with pytest.raises(TypeError):
        field.params = (2.0,)


def test_positivity_of_constant(unit_box):
    report = check_positivity(CoefficientField.constant(2.0), unit_box, 5)

    assert report.ok
    assert report.min_found == 2.0
    assert report.offending_point is None


def test_positivity_minimum_at_origin(unit_box, quadratic_field):
    report = check_positivity(quadratic_field, unit_box, 21)

    assert report.ok
    assert report.min_found == pytest.approx(1.0)
    assert report.max_found == pytest.approx(4.0)


def test_sign_change_is_reported(unit_box):
    field = CoefficientField(family=CoefficientFamily.LINEAR, params=(0.0, 1.0, 0.0, 0.0))

    report = check_positivity(field, unit_box, 5)

    assert not report.ok
    assert report.min_found == pytest.approx(-1.0)
    assert report.offending_point[0] == pytest.approx(-1.0)
    with pytest.raises(CoefficientError):
        require_positive(field, unit_box)


def test_upper_bound_is_checked(unit_box):
    bounded = CoefficientField(family=CoefficientFamily.QUADRATIC, params=(1.0, 1.0), a_max=3.0)

    report = check_positivity(bounded, unit_box, 3)

    assert not report.ok
    assert report.offending_point is not None


def test_positivity_needs_samples(unit_box):
    with pytest.raises(CoefficientError):
        check_positivity(CoefficientField.constant(1.0), unit_box, 0)
