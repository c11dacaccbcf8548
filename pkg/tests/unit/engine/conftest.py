import pytest

from app.engine.coefficient.schemas import CoefficientFamily, CoefficientField


# Declared here to use in multiple files
@pytest.fixture(scope='module')
def quadratic_field():
    return CoefficientField(family=CoefficientFamily.QUADRATIC, params=(1.0, 1.0))


@pytest.fixture(scope='module')
def exponential_field():
    return CoefficientField(family=CoefficientFamily.EXPONENTIAL, params=(1.0, 0.0, 0.0))


@pytest.fixture(scope='module')
def equilateral_panel():
    return [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 3.0 ** 0.5 / 2.0, 0.0],
    ]
