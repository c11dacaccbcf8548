import json
import logging
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from app.cli.schemas import RhsKind, RunConfig, TraceKind
from app.engine.bdie.problem import build_problem
from app.engine.bdie.schemas import DirichletProblem, RightHandSide
from app.engine.coefficient.schemas import CoefficientField
from app.engine.verification.cases import ManufacturedCase, get_case
from app.exceptions.config_error import ConfigError


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f'config file {path} does not exist')
    except json.JSONDecodeError as e:
        raise ConfigError(f'config file {path} is not valid JSON: line {e.lineno}: {e.msg}')
    if not isinstance(raw, dict):
        raise ConfigError(f'config file {path} must hold a JSON object')
    try:
        config = RunConfig.parse_obj(raw)
    except ValidationError as e:
        raise ConfigError(f'invalid config {path}:\n{e}')
    logging.info(f'Loaded config {path}')
    return config


def config_case(config: RunConfig) -> Optional[ManufacturedCase]:
    return get_case(config.case) if config.case else None


def config_field(config: RunConfig) -> CoefficientField:
    """The case's coefficient when a case is named, otherwise the coefficient section."""
    case = config_case(config)
    if case is None:
        return config.coefficient.field()
    if 'coefficient' in config.__fields_set__ and config.coefficient.field() != case.field:
        logging.warning(f'Case {case.name} fixes a={case.field.describe()}; the coefficient section is ignored')
    return case.field


def problem_from_config(config: RunConfig, refinement: Optional[int] = None) -> DirichletProblem:
    case = config_case(config)
    field = config_field(config)
    trace = case.u if config.dirichlet.kind == TraceKind.CASE else config.dirichlet.trace()
    if config.rhs.kind == RhsKind.CASE:
        rhs = case.f
    elif config.rhs.kind == RhsKind.POINT_SOURCES:
        rhs = RightHandSide.point_sources(config.rhs.sources)
    else:
        rhs = None
    return build_problem(
        config.geometry.geometry(),
        config.geometry.refinement if refinement is None else refinement,
        field,
        trace,
        rhs=rhs,
        policy=config.quadrature,
    )
