from pathlib import Path

from app.cli.config import config_field, load_config
from app.engine.verification.compare import compare_parametrices
from app.engine.verification.reports import write_comparison


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        'compare',
        help='compare matrices built with P/a(x) against P/a(y); writes compare.csv',
    )
    parser.add_argument('config', help='JSON run config')
    parser.set_defaults(func=cmd_compare)


def cmd_compare(args) -> int:
    config = load_config(args.config)
    report = compare_parametrices(
        config_field(config),
        config.geometry.geometry(),
        config.geometry.refinement,
        policy=config.quadrature,
    )
    write_comparison(report, Path(config.output_dir))
    return 0
