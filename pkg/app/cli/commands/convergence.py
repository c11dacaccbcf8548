import logging
from pathlib import Path
from typing import List

from app.cli.config import config_case, config_field, load_config, problem_from_config
from app.cli.schemas import check_level
from app.engine.bdie.conditioning import condition_report
from app.engine.verification.convergence import run_convergence
from app.engine.verification.reports import write_conditioning, write_convergence
from app.exceptions.config_error import ConfigError


def parse_levels(text: str) -> List[int]:
    try:
        levels = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise ConfigError(f'--levels expects comma-separated integers, got {text!r}')
    if not levels:
        raise ConfigError('--levels is empty')
    return levels


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        'convergence',
        help='manufactured-solution convergence study of the config\'s case; writes convergence.csv',
    )
    parser.add_argument('config', help='JSON run config with a "case"')
    parser.add_argument(
        '--levels',
        default=None,
        help='comma-separated refinement levels (default: the config\'s geometry.refinement)',
    )
    parser.add_argument(
        '--conditioning',
        action='store_true',
        help='also write conditioning.csv with 1-norm condition estimates per level',
    )
    parser.set_defaults(func=cmd_convergence)


def cmd_convergence(args) -> int:
    config = load_config(args.config)
    case = config_case(config)
    if case is None:
        raise ConfigError('the convergence study needs a manufactured "case" in the config')
    levels = parse_levels(args.levels) if args.levels else [config.geometry.refinement]
    for level in levels:
        try:
            check_level(config.geometry.kind, level)
        except ValueError as e:
            raise ConfigError(str(e))

    geometry = config.geometry.geometry()
    output_dir = Path(config.output_dir)
    report = run_convergence(
        case,
        geometry,
        levels,
        policy=config.quadrature,
        method=config.solver.method,
        tol=config.solver.tol,
    )
    write_convergence(report, output_dir)
    if args.conditioning:
        rows = condition_report(lambda level: problem_from_config(config, level), levels)
        write_conditioning(rows, output_dir, report.geometry, config_field(config).describe())
    if not report.all_solved:
        logging.error('Some refinement levels could not be solved')
        return 4
    return 0
