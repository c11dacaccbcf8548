import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.cli.router import build_parser
from app.exceptions.assembly_error import AssemblyError
from app.exceptions.bdie_error import BdieError
from app.exceptions.coefficient_error import CoefficientError
from app.exceptions.config_error import ConfigError
from app.exceptions.mesh_error import MeshError
from app.exceptions.quadrature_error import QuadratureError
from app.exceptions.singularity_error import SingularityError
from app.exceptions.solver_error import SolverError

EXIT_CODES = (
    ((ConfigError, CoefficientError), 2),
    ((MeshError, QuadratureError, AssemblyError, SingularityError), 3),
    ((SolverError,), 4),
)


def exit_code_for(error: BdieError) -> int:
    for kinds, code in EXIT_CODES:
        if isinstance(error, kinds):
            return code
    return 3


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        format='%(asctime)s:%(levelname)s:%(message)s',
        level=logging.DEBUG if args.verbose else logging.INFO,
    )  # NOSONAR
    try:
        return args.func(args)
    except ValidationError as e:
        logging.error(f'Invalid input: {e}')
        return 2
    except BdieError as e:
        code = exit_code_for(e)
        logging.error(f'{type(e).__name__}: {e.message}')
        return code


if __name__ == '__main__':
    sys.exit(main())
