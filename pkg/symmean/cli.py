"""
Module containing the command-line interface: mean2, wmean, nmean, verify and rate subcommands.

.. module:: cli
   :synopsis:
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, TextIO

from symmean.diagnostics import (
    UnstableEstimate, estimate_b2, estimate_order, verify_centroid, verify_lyapunov, verify_order,
    verify_sandwich, verify_trace_inequality
)
from symmean.enums import CheckName, IterationMethod
from symmean.file_formats import JSONMatrixWriter, JSONReportWriter, ParseError, parse_matrix_files
from symmean.mean_kernels import KernelError, MeanKernel, mean2
from symmean.multivariate import MaxItersExceeded, MultiMeanConfig, multivariate_mean
from symmean.spd_core import MatrixMeanException, NotPositiveDefinite, NotSquare, SpdMatrix
from symmean.weighted_means import MaxDepthExceeded, WeightedMeanConfig, weighted_mean, weighted_trace_as_dict

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_WEIGHTED_TOL = 1e-12
DEFAULT_MULTI_TOL = 1e-10
DEFAULT_ORDER_TOL = 1e-13


class RunConfig:
    """Validated settings of one command-line run."""

    def __init__(self, arguments: argparse.Namespace) -> None:
        self.command: str = arguments.command
        self.kernel_name: str = arguments.kernel
        self.method: str = IterationMethod.parse(getattr(arguments, 'method', IterationMethod.ALM))
        self.t: Optional[float] = getattr(arguments, 't', None)
        self.tol: float = arguments.tol if arguments.tol is not None else self._default_tol(arguments)
        self.max_iters: int = arguments.max_iters
        self.max_depth: int = arguments.max_depth
        self.max_variables: int = arguments.max_variables
        self.workers: int = arguments.workers
        self.seed: int = arguments.seed
        self.out_path: Optional[str] = arguments.out
        self.trace_path: Optional[str] = arguments.trace
        self.trace_full: bool = arguments.trace_full
        self.files: List[str] = list(getattr(arguments, 'files', []))
        self.extra: Dict[str, Any] = {
            name: getattr(arguments, name) for name in ('check', 'samples', 'dim', 'k', 'n', 'spread', 'window')
            if hasattr(arguments, name)
        }
        self.validate()
        self.kernel: MeanKernel = MeanKernel.from_name(self.kernel_name)

    @staticmethod
    def _default_tol(arguments: argparse.Namespace) -> float:
        if arguments.command in ('wmean', 'mean2'):
            return DEFAULT_WEIGHTED_TOL
        if getattr(arguments, 'check', None) == CheckName.ORDER:
            return DEFAULT_ORDER_TOL
        return DEFAULT_MULTI_TOL

    def validate(self) -> None:
        """
        Checks every value against the preconditions of the modules it is handed to.

        :raises: ValueError
        """
        if self.t is not None and not 0.0 <= self.t <= 1.0:
            raise ValueError(f't must lie in [0, 1], got {self.t}')
        if not self.tol > 0:
            raise ValueError(f'--tol must be positive, got {self.tol}')
        if self.max_iters < 1 or self.max_depth < 1 or self.workers < 1:
            raise ValueError('--max-iters, --max-depth and --workers must be positive')
        if self.max_variables < 2:
            raise ValueError('--max-variables must be at least 2')
        if self.extra.get('samples', 1) < 1 or self.extra.get('dim', 1) < 1:
            raise ValueError('--samples and --dim must be positive')
        if self.extra.get('n', 2) < 2:
            raise ValueError('--n must be at least 2')
        if 'spread' in self.extra and not 0.0 < self.extra['spread'] < 1.0:
            raise ValueError(f'--spread must lie in (0, 1), got {self.extra["spread"]}')
        if self.extra.get('window', 2) < 2:
            raise ValueError('--window must be at least 2')
        if 'k' in self.extra and not 0.0 <= self.extra['k'] <= 2.0:
            raise ValueError(f'-k must lie in [0, 2], got {self.extra["k"]}')

    @property
    def weighted_cfg(self) -> WeightedMeanConfig:
        """
        Weighted-mean process configuration.

        :return: Configuration for wmean and the inner BMP steps
        :rtype: WeightedMeanConfig
        """
        tol = self.tol if self.command in ('wmean', 'mean2') else DEFAULT_WEIGHTED_TOL
        return WeightedMeanConfig(tol=tol, max_depth=self.max_depth)

    @property
    def multi_cfg(self) -> MultiMeanConfig:
        """
        ALM/BMP configuration.

        :return: Configuration for nmean, rate and the engine-based checks
        :rtype: MultiMeanConfig
        """
        return MultiMeanConfig(tol=self.tol, max_iters=self.max_iters, inner_cfg=self.weighted_cfg,
                               max_variables=self.max_variables, workers=self.workers)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--kernel', default='geometric',
                        help='arithmetic, harmonic, geometric, logarithmic, square or kfamily:<k> (default: geometric)')
    common.add_argument('--tol', type=float, default=None,
                        help=f'Tolerance (default: {DEFAULT_WEIGHTED_TOL:g} for wmean, '
                             f'{DEFAULT_MULTI_TOL:g} otherwise)')
    common.add_argument('--max-iters', type=int, default=200, dest='max_iters',
                        help='Outer steps per recursion level (default: 200)')
    common.add_argument('--max-depth', type=int, default=64, dest='max_depth',
                        help='Depth cap of the weighted-mean process (default: 64)')
    common.add_argument('--max-variables', type=int, default=8, dest='max_variables',
                        help='Largest accepted number of matrices (default: 8)')
    common.add_argument('--workers', type=int, default=1, help='Threads for the top-level sub-means (default: 1)')
    common.add_argument('--out', default=None, help='Write the result here instead of stdout')
    common.add_argument('--trace', default=None, help='Write the iteration trace JSON here')
    common.add_argument('--trace-full', action='store_true', dest='trace_full',
                        help='Include every iterate in the trace')
    common.add_argument('--seed', type=int, default=0, help='Seed of randomized commands (default: 0)')
    common.add_argument('--verbose', action='store_true', help='Log progress at DEBUG level')
    return common


def build_parser() -> argparse.ArgumentParser:
    """
    Builds the argument parser with one subparser per subcommand.

    :return: Parser
    :rtype: argparse.ArgumentParser
    """
    common = _common_parser()
    parser = argparse.ArgumentParser(prog='symmean', description='Matrix means of positive definite matrices.')
    subparsers = parser.add_subparsers(dest='command', required=True)

    mean2_parser = subparsers.add_parser('mean2', parents=[common], help='Two-variable mean M(A, B)')
    mean2_parser.add_argument('files', nargs=2, help='Matrix files A and B')

    wmean_parser = subparsers.add_parser('wmean', parents=[common], help='Weighted mean M_t(A, B)')
    wmean_parser.add_argument('-t', type=float, required=True, help='Weight in [0, 1]')
    wmean_parser.add_argument('files', nargs=2, help='Matrix files A and B')

    for name, summary in (('nmean', 'n-variable ALM/BMP mean'), ('rate', 'Fitted convergence order of a run')):
        sub = subparsers.add_parser(name, parents=[common], help=summary)
        sub.add_argument('--method', type=str.lower, choices=['alm', 'bmp'], default='alm')
        sub.add_argument('--window', type=int, default=4, help='Pairs used by the order fit (default: 4)')
        sub.add_argument('files', nargs='+', help='Matrix files X_1 ... X_n')

    verify_parser = subparsers.add_parser('verify', parents=[common], help='Sampled checks, printed as JSON')
    verify_parser.add_argument('--check', choices=list(CheckName.ALL), required=True)
    verify_parser.add_argument('--method', type=str.lower, choices=['alm', 'bmp'], default='alm')
    verify_parser.add_argument('--samples', type=int, default=100, help='Random pairs (default: 100)')
    verify_parser.add_argument('--dim', type=int, default=3, help='Matrix dimension (default: 3)')
    verify_parser.add_argument('-k', type=float, default=2.0, help='k-family bound (default: 2)')
    verify_parser.add_argument('-t', type=float, default=0.5, help='Weight (default: 0.5)')
    verify_parser.add_argument('--n', type=int, default=3, help='Number of matrices (default: 3)')
    verify_parser.add_argument('--spread', type=float, default=0.5,
                               help='Cluster spread for --check order (default: 0.5)')
    verify_parser.add_argument('--window', type=int, default=4, help='Pairs used by the order fit (default: 4)')
    return parser


def _emit(text: str, config: RunConfig, stdout: TextIO) -> None:
    if config.out_path:
        with open(config.out_path, 'w', encoding='utf-8') as out_file:
            out_file.write(text + '\n')
    else:
        stdout.write(text + '\n')


def _load_inputs(config: RunConfig) -> List[SpdMatrix]:
    if len(config.files) > config.max_variables:
        raise ValueError(f'{len(config.files)} matrices exceed --max-variables {config.max_variables}')
    return parse_matrix_files(config.files)


def _run_verify(config: RunConfig) -> Dict[str, Any]:
    extra = config.extra
    check = extra['check']
    t = config.t if config.t is not None else 0.5
    if check == CheckName.SANDWICH:
        return verify_sandwich(config.kernel, extra['samples'], extra['dim'], config.seed, t).as_dict()
    if check == CheckName.TRACE_INEQUALITY:
        return verify_trace_inequality(config.kernel, extra['k'], t, extra['samples'], extra['dim'],
                                       config.seed).as_dict()
    if check == CheckName.CENTROID:
        return verify_centroid(config.kernel, config.method, extra['n'], extra['dim'], config.seed,
                               config.multi_cfg).as_dict()
    if check == CheckName.ORDER:
        return verify_order(config.method, config.kernel, extra['n'], extra['dim'], config.seed,
                            extra['spread'], config.multi_cfg, extra['window']).as_dict()
    if check == CheckName.B2:
        return estimate_b2(config.kernel, config.weighted_cfg).as_dict()
    return verify_lyapunov(config.kernel, config.method, extra['n'], extra['dim'], config.seed,
                           config.multi_cfg, extra['k']).as_dict()


def _execute(config: RunConfig, matrices: List[SpdMatrix], stdout: TextIO) -> None:
    if config.command == 'verify':
        _emit(JSONReportWriter.dumps(_run_verify(config)), config, stdout)
        return

    if config.command == 'mean2':
        result = mean2(config.kernel, matrices[0], matrices[1])
        _emit(JSONMatrixWriter.dumps(result, label=f'{config.kernel.label} mean'), config, stdout)
    elif config.command == 'wmean':
        t = config.t or 0.0
        try:
            result, steps = weighted_mean(config.kernel, t, matrices[0], matrices[1], config.weighted_cfg)
        except MaxDepthExceeded as error:
            if config.trace_path:
                JSONReportWriter.dump(weighted_trace_as_dict(config.kernel, t, error.steps, False, config.trace_full),
                                      target_file=config.trace_path)
            raise
        if config.trace_path:
            JSONReportWriter.dump(weighted_trace_as_dict(config.kernel, t, steps, True, config.trace_full),
                                  target_file=config.trace_path)
        _emit(JSONMatrixWriter.dumps(result, label=f'{config.kernel.label} mean t={config.t!r}'), config, stdout)
    else:
        try:
            result, trace = multivariate_mean(config.method, config.kernel, matrices, config.multi_cfg)
        except MaxItersExceeded as error:
            if config.trace_path:
                JSONReportWriter.dump(error.trace.as_dict(config.trace_full), target_file=config.trace_path)
            raise
        if config.trace_path:
            JSONReportWriter.dump(trace.as_dict(config.trace_full), target_file=config.trace_path)
        if config.command == 'rate':
            report = estimate_order(trace, config.extra['window'], config.kernel.label)
            _emit(JSONReportWriter.dumps(report.as_dict()), config, stdout)
        else:
            _emit(JSONMatrixWriter.dumps(result, label=f'{config.method} {config.kernel.label} mean'),
                  config, stdout)


def run_command(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """
    Runs one subcommand.

    :param argv: Arguments without the program name (default: sys.argv[1:])
    :type argv: list[str]
    :param stdout: Stream receiving results (default: sys.stdout)
    :type stdout: TextIO
    :return: 0 on success, 1 on computational failure, 2 on usage or parse errors
    :rtype: int
    """
    stdout = stdout or sys.stdout
    try:
        arguments = build_parser().parse_args(argv)
    except SystemExit as error:
        return error.code if isinstance(error.code, int) else EXIT_USAGE

    logging.basicConfig(stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('symmean').setLevel(logging.DEBUG if arguments.verbose else logging.WARNING)

    try:
        config = RunConfig(arguments)
        matrices = _load_inputs(config) if config.command != 'verify' else []
    except (ValueError, KernelError, ParseError, NotPositiveDefinite, NotSquare) as error:
        sys.stderr.write(f'symmean {arguments.command}: {error}\n')
        return EXIT_USAGE

    try:
        _execute(config, matrices, stdout)
    except UnstableEstimate as error:
        sys.stderr.write(f'symmean {config.command}: {error}\n')
        _emit(JSONReportWriter.dumps(error.report.as_dict()), config, stdout)
        return EXIT_FAILURE
    except MatrixMeanException as error:
        sys.stderr.write(f'symmean {config.command}: {error}\n')
        return EXIT_FAILURE
    return EXIT_OK


def main() -> None:
    """Console entry point."""
    sys.exit(run_command())
