"""
Command-line entry point

    toral-mass lattice --n 25 --dim 2 --discrepancy
    toral-mass correlations --n 25 --dim 2 --l 4 --K 10
    toral-mass variance --config cfg.json --out variance.json --manifest run.json
    toral-mass selftest

Exit codes: 0 on success, 1 on invalid input or failed checks, 2 when an
exact computation would exceed its work budget.
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from . import __version__, signals
from .exceptions import ToralMassError
from .sdk import ToralMassSDK

logger = logging.getLogger('toral_mass.cli')

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BUDGET = 2

_GLOBAL_OPTIONS = ('command', 'threads', 'verbose', 'out', 'manifest', 'action')


def _log_batch(sender, start: int, stop: int, total: int):
    logger.debug("sampled %d/%d", stop, total)


def _log_report(sender, path: str, format: str, checksum: str):
    logger.info("wrote %s (%s, %s)", path, format, checksum)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--threads', type=int, help='worker threads (default: TORAL_MASS_THREADS or all CPUs)')
    common.add_argument('--verbose', '-v', action='store_true', help='debug logging')
    common.add_argument('--out', help='report file; .csv writes CSV, anything else JSON')
    common.add_argument('--manifest', help='write the run manifest to this JSON file')

    parser = argparse.ArgumentParser(prog='toral-mass', description=__doc__.split('\n\n')[0].strip())
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = parser.add_subparsers(dest='command', required=True)

    lattice = commands.add_parser('lattice', parents=[common], help='enumerate E_n and its discrepancy')
    lattice.add_argument('--n', type=int, required=True)
    lattice.add_argument('--dim', type=int, choices=(2, 3), required=True)
    lattice.add_argument('--discrepancy', action='store_true')
    lattice.add_argument('--cap-mode', choices=('exact', 'sampled'), help='d=3 only; default by exact_cap_bound')
    lattice.add_argument('--samples', type=int, default=4096, help='cap centres in sampled mode')
    lattice.add_argument('--seed', type=int, default=0, help='cap-centre seed in sampled mode')
    lattice.add_argument('--eta', type=float, help='report Delta_3(n) * n^eta')

    correlations = commands.add_parser('correlations', parents=[common], help='exact correlation counts')
    correlations.add_argument('--n', type=int, required=True)
    correlations.add_argument('--dim', type=int, choices=(2, 3), required=True)
    correlations.add_argument('--l', type=int, required=True)
    quasi = correlations.add_mutually_exclusive_group()
    quasi.add_argument('--K', help='quasi-correlation radius, decimal or p/q')
    quasi.add_argument('--delta', help='check separateness at n^(1/2 - delta)')
    correlations.add_argument('--gamma', type=float)
    correlations.add_argument('--tuples', help='CSV file for every zero-sum tuple')

    flatness = commands.add_parser('flatness', parents=[common], help='flatness measures of the coefficients')
    flatness.add_argument('--config', required=True)
    flatness.add_argument('--eps', type=float)
    flatness.add_argument('--eta', type=float)
    flatness.add_argument('--n', type=int)

    variance = commands.add_parser('variance', parents=[common], help='exact, predicted and sampled variance')
    variance.add_argument('--config', required=True)
    variance.add_argument('--eps', type=float, help='with --eta, report the bound ratios')
    variance.add_argument('--eta', type=float)
    _add_overrides(variance)

    for name, text in (('clt', 'sampled moments and normal approximation'),
                       ('restricted', 'moments with the centre drawn from a small ball')):
        sampled = commands.add_parser(name, parents=[common], help=text)
        sampled.add_argument('--config', required=True)
        sampled.add_argument('--samples-out', help='CSV file of every sample')
        _add_overrides(sampled)

    pairdist = commands.add_parser('pairdist', parents=[common], help='pair-distance distributions')
    pairdist.add_argument('--config', required=True)
    pairdist.add_argument('--grid', default='0:2:0.01', help='start:stop:step')
    pairdist.add_argument('--variant', choices=('F', 'F_lambda0', 'F3'))
    pairdist.add_argument('--lambda0', help='lattice point as x,y for F_lambda0')
    pairdist.add_argument('--n', type=int)

    hypotheses = commands.add_parser('hypotheses', parents=[common], help='check the D and A hypotheses')
    hypotheses.add_argument('--n', type=int, required=True)
    hypotheses.add_argument('--dim', type=int, choices=(2, 3), required=True)
    hypotheses.add_argument('--eps', type=float, required=True)
    hypotheses.add_argument('--l', type=int, required=True)
    hypotheses.add_argument('--delta', required=True)
    hypotheses.add_argument('--gamma', type=float)
    hypotheses.add_argument('--eta', type=float)

    selftest = commands.add_parser('selftest', parents=[common], help='identity and brute-force checks')
    selftest.add_argument('--suite', choices=('all', 'specfun', 'equivalence'), default='all')

    specfun = commands.add_parser('specfun', parents=[common])
    specfun.add_argument('action', choices=('selftest',))
    return parser


def _add_overrides(parser: argparse.ArgumentParser):
    parser.add_argument('--n', type=int, help='override n')
    parser.add_argument('--seed', type=int, help='override mc.seed')
    parser.add_argument('--M', type=int, help='override mc.M')


def _print_checks(rows: List[Dict[str, Any]]):
    width = max([len(row['name']) for row in rows] + [4])
    for row in rows:
        status = 'PASS' if row['passed'] else 'FAIL'
        print(f"{status}  {row['name']:<{width}}  error={row['error']:.3e}  tolerance={row['tolerance']:.1e}")


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse argv, run one subcommand and return the exit code

    Args:
        argv: Arguments without the program name; sys.argv[1:] when omitted
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    signals.batch_sampled.connect(_log_batch)
    signals.report_written.connect(_log_report)

    command = args.command
    options = {key: value for key, value in vars(args).items()
               if key not in _GLOBAL_OPTIONS and value is not None}
    if command == 'specfun':
        command, options = 'selftest', {'suite': 'specfun'}

    try:
        sdk = ToralMassSDK.initialize({'threads': args.threads} if args.threads is not None else {})
    except ToralMassError as e:
        print(f"error [CONFIG_ERROR]: {e}", file=sys.stderr)
        return EXIT_INVALID

    try:
        response = sdk.compute.runner.execute(command, options, out=args.out, manifest_path=args.manifest)
    finally:
        sdk.close()

    if command == 'selftest' and 'data' in response:
        _print_checks(response['data']['results'])
    if not response['success']:
        print(f"error [{response.get('errorCode')}]: {response['error']}", file=sys.stderr)
        return EXIT_BUDGET if response.get('errorCode') == 'BUDGET_EXCEEDED' else EXIT_INVALID
    if command != 'selftest':
        if args.out:
            print(f"wrote {args.out}")
        else:
            sys.stdout.write(response['body'])
    return EXIT_OK


def main():
    sys.exit(run())
