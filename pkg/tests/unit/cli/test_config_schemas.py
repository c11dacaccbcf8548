import json

import pytest
from pydantic import ValidationError

from app.cli.commands.convergence import parse_levels
from app.cli.config import config_field, load_config, problem_from_config
from app.cli.schemas import GeometryConfig, RhsConfig, RhsKind, RunConfig, TraceKind, level_cap
from app.engine.bdie.schemas import SolveMethod
from app.engine.coefficient.schemas import CoefficientFamily
from app.engine.mesh.schemas import GeometryKind
from app.engine.quadrature.schemas import SelfTermStrategy
from app.exceptions.config_error import ConfigError


def test_defaults():
    config = RunConfig()

    assert config.geometry.kind == GeometryKind.BALL
    assert config.geometry.size == 1.0
    assert config.geometry.refinement == 1
    assert config.coefficient.family == CoefficientFamily.CONSTANT
    assert config.rhs.kind == RhsKind.ZERO
    assert config.dirichlet.kind == TraceKind.CONSTANT
    assert config.quadrature.near_threshold == 2.0
    assert config.quadrature.self_term == SelfTermStrategy.ANALYTIC_BALL
    assert config.solver.method == SolveMethod.DIRECT_LU
    assert config.output_dir == 'output'
    assert config.case is None


def test_config_is_immutable():
    config = RunConfig()

    with pytest.raises(TypeError):
        config.output_dir = 'elsewhere'


def test_unknown_keys_are_rejected():
    with pytest.raises(ValidationError):
        RunConfig.parse_obj({'geometry': {'kind': 'ball', 'radius': 2.0}})


@pytest.mark.parametrize('kind, lowest, highest', [
    (GeometryKind.BALL, 0, 6),
    (GeometryKind.CUBE, 1, 24),
])
def test_level_caps(kind, lowest, highest):
    assert level_cap(kind) == (lowest, highest)

    GeometryConfig(kind=kind, refinement=highest)
    with pytest.raises(ValidationError):
        GeometryConfig(kind=kind, refinement=highest + 1)


def test_cube_needs_one_division():
    with pytest.raises(ValidationError):
        GeometryConfig(kind=GeometryKind.CUBE, refinement=0)


def test_point_sources_validation():
    rhs = RhsConfig.parse_obj({'kind': 'point_sources', 'sources': [{'location': [0.1, 0.0, 0.0]}]})

    assert rhs.sources[0].strength == 1.0
    with pytest.raises(ValidationError):
        RhsConfig(kind=RhsKind.POINT_SOURCES)
    with pytest.raises(ValidationError):
        RhsConfig.parse_obj({'kind': 'zero', 'sources': [{'location': [0.1, 0.0, 0.0]}]})


def test_case_names():
    assert RunConfig(case='c3').case == 'C3'
    with pytest.raises(ValidationError):
        RunConfig(case='C9')


def test_case_reference_needs_case():
    with pytest.raises(ValidationError):
        RunConfig.parse_obj({'dirichlet': {'kind': 'case'}})
    with pytest.raises(ValidationError):
        RunConfig.parse_obj({'rhs': {'kind': 'case'}})


def test_linear_trace():
    config = RunConfig.parse_obj({'dirichlet': {'kind': 'linear', 'coefficients': [1.0, 2.0, 0.0, -1.0]}})

    values = config.dirichlet.trace()([[1.0, 5.0, 2.0], [0.0, 0.0, 0.0]])

    assert list(values) == [1.0, 1.0]


def test_case_fixes_the_coefficient():
    config = RunConfig.parse_obj({'case': 'C4', 'coefficient': {'family': 'constant', 'params': [3.0]}})

    field = config_field(config)

    assert field.family == CoefficientFamily.EXPONENTIAL
    assert field.params == (1.0, 0.0, 0.0)


def test_problem_from_config():
    config = RunConfig.parse_obj({
        'geometry': {'kind': 'cube', 'size': 1.0, 'refinement': 1},
        'case': 'C2',
        'dirichlet': {'kind': 'case'},
        'rhs': {'kind': 'case'},
    })

    problem = problem_from_config(config)

    assert problem.surface.n_panels == 12
    assert problem.volume.cells.shape[0] == 6
    assert problem.rhs.is_zero


def test_load_config(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'geometry': {'refinement': 0}, 'output_dir': str(tmp_path / 'out')}))

    config = load_config(path)

    assert config.geometry.refinement == 0
    assert config.output_dir == str(tmp_path / 'out')


@pytest.mark.parametrize('content', [
    '{"geometry": ',
    '[1, 2]',
    '{"solver": {"tol": 2.0}}',
    '{"coefficient": {"family": "linear", "params": [1.0]}}',
])
def test_load_config_errors(tmp_path, content):
    path = tmp_path / 'run.json'
    path.write_text(content)

    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_config(tmp_path):
    with pytest.raises(ConfigError) as e:
        load_config(tmp_path / 'absent.json')

    assert 'does not exist' in e.value.message


def test_parse_levels():
    assert parse_levels('0,1, 2') == [0, 1, 2]
    with pytest.raises(ConfigError):
        parse_levels('1,two')
    with pytest.raises(ConfigError):
        parse_levels(',')
