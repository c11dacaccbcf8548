import logging
from pathlib import Path

from app.cli.config import load_config, problem_from_config
from app.engine.bdie.assembly import assemble_system
from app.engine.bdie.solution_io import write_diagnostics, write_solution
from app.engine.bdie.solve import solve


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        'solve',
        help='assemble and solve the BDIE system; writes solution.csv and diagnostics.json',
    )
    parser.add_argument('config', help='JSON run config')
    parser.set_defaults(func=cmd_solve)


def cmd_solve(args) -> int:
    config = load_config(args.config)
    problem = problem_from_config(config)
    solution = solve(assemble_system(problem), method=config.solver.method, tol=config.solver.tol, overwrite=True)
    output_dir = Path(config.output_dir)
    write_solution(solution, problem, output_dir)
    write_diagnostics(solution, output_dir)
    logging.info(f'Solve finished: residual {solution.diagnostics.residual_norm:.3g}')
    return 0
