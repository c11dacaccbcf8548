import logging
from pathlib import Path

from app.cli.config import config_field, load_config
from app.engine.verification.identities import identity_suite
from app.engine.verification.reports import write_identities


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        'identities',
        help='check jump relations, kernel and operator identities; writes identities.csv, exits 1 on failure',
    )
    parser.add_argument('config', help='JSON run config')
    parser.set_defaults(func=cmd_identities)


def cmd_identities(args) -> int:
    config = load_config(args.config)
    report = identity_suite(
        config.geometry.geometry(),
        config_field(config),
        config.geometry.refinement,
        policy=config.quadrature,
    )
    write_identities(report, Path(config.output_dir))
    for failure in report.failures:
        logging.error(f'Identity {failure.identity} failed: {failure.measured:.3e} vs {failure.threshold:g}')
    return 0 if report.passed else 1
