import json

import pytest

from app.main import main
from app.runtime.csv_report import read_report


@pytest.fixture
def write_config(tmp_path):
    def write(**sections):
        sections.setdefault('output_dir', str(tmp_path / 'out'))
        path = tmp_path / 'run.json'
        path.write_text(json.dumps(sections))
        return str(path)

    return write


def column(rows, name):
    index = rows[0].index(name)
    return [row[index] for row in rows[1:]]


def test_help():
    assert main(['--help']) == 0
    assert main(['solve', '--help']) == 0


def test_bad_arguments():
    assert main([]) == 2
    assert main(['solve', '--no-such-flag', 'run.json']) == 2
    assert main(['transmogrify']) == 2


def test_solve_constant_trace(write_config, tmp_path):
    # Arrange
    config = write_config(geometry={'kind': 'ball', 'refinement': 1}, dirichlet={'kind': 'constant', 'value': 1.0})

    # Act
    code = main(['solve', config])

    # Assert
    assert code == 0
    comments, (cells, panels) = read_report(tmp_path / 'out' / 'solution.csv')
    assert '# cells: 320' in comments
    assert all(abs(float(u) - 1.0) <= 2e-2 for u in column(cells, 'u'))
    assert len(panels) == 81
    diagnostics = json.loads((tmp_path / 'out' / 'diagnostics.json').read_text())
    assert diagnostics['residual_norm'] <= 1e-10


def test_solve_linear_trace(write_config, tmp_path):
    # Arrange: u = 1 + x2 is harmonic
    config = write_config(
        geometry={'kind': 'ball', 'refinement': 1},
        dirichlet={'kind': 'linear', 'coefficients': [1.0, 0.0, 1.0, 0.0]},
    )

    # Act
    code = main(['solve', config])

    # Assert
    assert code == 0
    _, (cells, _) = read_report(tmp_path / 'out' / 'solution.csv')
    points = zip(column(cells, 'x'), column(cells, 'y'), column(cells, 'z'), column(cells, 'u'))
    deep = [(float(y), float(u)) for x, y, z, u in points if float(x) ** 2 + float(y) ** 2 + float(z) ** 2 <= 0.25]
    assert deep
    for y, u in deep:
        assert u == pytest.approx(1.0 + y, abs=0.15)


def test_solve_point_source_metadata(write_config, tmp_path):
    config = write_config(
        geometry={'kind': 'ball', 'refinement': 1},
        rhs={'kind': 'point_sources', 'sources': [{'location': [0.0, 0.0, 0.1], 'strength': 2.0}]},
    )

    assert main(['solve', config]) == 0

    comments, _ = read_report(tmp_path / 'out' / 'solution.csv')
    assert '# rhs: point_sources' in comments
    assert '# source_0: location=(0.0 0.0 0.1) strength=2.0' in comments


def test_solve_rejects_shallow_point_source(write_config):
    config = write_config(rhs={'kind': 'point_sources', 'sources': [{'location': [0.99, 0.0, 0.0]}]})

    assert main(['solve', config]) == 3


def test_solve_reports_failed_factorization(write_config, mocker):
    config = write_config(geometry={'kind': 'ball', 'refinement': 0}, dirichlet={'kind': 'constant', 'value': 1.0})
    mocker.patch('app.engine.bdie.solve.lu_factor', side_effect=ValueError('matrix is singular'))

    assert main(['solve', config]) == 4


def test_invalid_config_exit_code(write_config, tmp_path):
    beyond_cap = write_config(geometry={'kind': 'ball', 'refinement': 7})
    assert main(['solve', beyond_cap]) == 2

    assert main(['solve', str(tmp_path / 'absent.json')]) == 2

    negative = write_config(coefficient={'family': 'linear', 'params': [0.5, 1.0, 0.0, 0.0]})
    assert main(['solve', negative]) == 2


def test_convergence_single_level(write_config, tmp_path):
    # Arrange
    config = write_config(
        geometry={'kind': 'ball', 'refinement': 1},
        case='C1',
        dirichlet={'kind': 'case'},
        rhs={'kind': 'case'},
    )

    # Act
    code = main(['convergence', config, '--levels', '1'])

    # Assert
    assert code == 0
    comments, (table,) = read_report(tmp_path / 'out' / 'convergence.csv')
    assert '# case: C1' in comments
    assert column(table, 'refinement') == ['1']
    assert column(table, 'solved') == ['true']
    assert column(table, 'order_err_u_L2') == ['exact']


def test_convergence_level_beyond_cap(write_config):
    config = write_config(case='C1')

    assert main(['convergence', config, '--levels', '1,9']) == 2
    assert main(['convergence', config, '--levels', 'one']) == 2


def test_convergence_needs_case(write_config):
    assert main(['convergence', write_config()]) == 2


def test_solve_is_reproducible(write_config, tmp_path):
    # Arrange
    first = write_config(
        geometry={'kind': 'ball', 'refinement': 1},
        coefficient={'family': 'quadratic', 'params': [1.0, 1.0]},
        dirichlet={'kind': 'linear', 'coefficients': [1.0, 0.0, 1.0, 0.0]},
        output_dir=str(tmp_path / 'first'),
    )
    assert main(['solve', first]) == 0
    second = write_config(
        geometry={'kind': 'ball', 'refinement': 1},
        coefficient={'family': 'quadratic', 'params': [1.0, 1.0]},
        dirichlet={'kind': 'linear', 'coefficients': [1.0, 0.0, 1.0, 0.0]},
        output_dir=str(tmp_path / 'second'),
    )

    # Act
    code = main(['solve', second])

    # Assert
    assert code == 0
    assert (tmp_path / 'first' / 'solution.csv').read_bytes() == (tmp_path / 'second' / 'solution.csv').read_bytes()


def test_convergence_report_is_reproducible(write_config, tmp_path):
    reports = []
    for name in ('first', 'second'):
        config = write_config(
            case='C2',
            rhs={'kind': 'case'},
            dirichlet={'kind': 'case'},
            output_dir=str(tmp_path / name),
        )
        assert main(['convergence', config, '--levels', '0']) == 0
        reports.append((tmp_path / name / 'convergence.csv').read_bytes())

    assert reports[0] == reports[1]


def test_identities_pass_at_default_depth(write_config, tmp_path):
    config = write_config(geometry={'kind': 'ball', 'refinement': 2})

    code = main(['identities', config])

    comments, (table,) = read_report(tmp_path / 'out' / 'identities.csv')
    assert code == 0
    assert '# passed: true' in comments
    assert set(column(table, 'passed')) == {'true'}
    assert 'path_equivalence_calV' in column(table, 'identity')


def test_identities_fail_without_singular_refinement(write_config, tmp_path):
    # Arrange: no subdivision near the singularity
    config = write_config(geometry={'kind': 'ball', 'refinement': 2}, quadrature={'depth': 0})

    # Act
    code = main(['identities', config])

    # Assert
    assert code == 1
    comments, (table,) = read_report(tmp_path / 'out' / 'identities.csv')
    assert '# passed: false' in comments
    passed = dict(zip(column(table, 'identity'), column(table, 'passed')))
    assert passed['double_layer_jump'] == 'false'
    assert passed['conormal_jump'] == 'false'


def test_compare_constant_coefficient(write_config, tmp_path):
    config = write_config(geometry={'kind': 'ball', 'refinement': 0}, coefficient={'params': [2.0]})

    assert main(['compare', config]) == 0

    comments, (table,) = read_report(tmp_path / 'out' / 'compare.csv')
    assert '# identical: true' in comments
    assert 'R_infinity_norm' in column(table, 'quantity')
