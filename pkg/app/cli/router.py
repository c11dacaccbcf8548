import argparse

from app.cli.commands import compare, convergence, identities, solve

DESCRIPTION = '''\
Boundary-domain integral equation solver for div(a grad u) = f, u = phi0 on the boundary.

Config defaults: geometry {"kind": "ball", "size": 1.0, "refinement": 1};
coefficient {"family": "constant", "params": [1.0]}; rhs {"kind": "zero"};
dirichlet {"kind": "constant", "value": 0.0}; quadrature {"near_threshold": 2.0, "depth": 4,
"self_term": "analytic_ball"}; solver {"method": "direct_lu", "tol": 1e-10}; output_dir "output".
BDIE_THREADS caps the assembly worker threads (0 = one per CPU).
'''


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='bdie',
        description=DESCRIPTION,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    subparsers = parser.add_subparsers(dest='command', metavar='{solve,convergence,identities,compare}')
    subparsers.required = True

    solve.register(subparsers)
    convergence.register(subparsers)
    identities.register(subparsers)
    compare.register(subparsers)
    return parser
