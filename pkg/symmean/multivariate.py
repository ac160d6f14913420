"""
Module containing the ALM and BMP symmetrization procedures that extend a two-variable mean to n variables.

.. module:: multivariate
   :synopsis:
"""
import logging
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

from symmean.enums import IterationMethod
from symmean.mean_kernels import ARITHMETIC_PULLBACK, HARMONIC_PULLBACK, MeanKernel, PullbackMean, mean2
from symmean.spd_core import DimensionMismatch, MatrixMeanException, SpdMatrix, euclid_dist, r_metric
from symmean.weighted_means import WeightedMeanConfig, weighted_mean

LOGGER = logging.getLogger(__name__)

INNER_TOL_FLOOR: float = 1e-13

IterationStep = namedtuple('IterationStep', ['l', 'iterates', 'a', 'e', 'r_diam'])


class MaxItersExceeded(MatrixMeanException):
    """Raised when an ALM/BMP run does not converge within max_iters outer steps."""

    def __init__(self, message: str, trace: 'IterationTrace') -> None:
        super().__init__(message)
        self.trace: 'IterationTrace' = trace


class TooManyVariables(MatrixMeanException):
    """Raised when the variable count exceeds the configured cap."""


class MultiMeanConfig:
    """Tolerances and caps of an ALM/BMP run."""

    def __init__(
            self,
            tol: float = 1e-10,
            max_iters: int = 200,
            inner_cfg: Optional[WeightedMeanConfig] = None,
            max_variables: int = 8,
            workers: int = 1,
    ) -> None:
        if not tol > 0:
            raise ValueError(f'tol must be positive, got {tol}')
        if max_iters < 1:
            raise ValueError(f'max_iters must be at least 1, got {max_iters}')
        if max_variables < 2:
            raise ValueError(f'max_variables must be at least 2, got {max_variables}')
        if workers < 1:
            raise ValueError(f'workers must be at least 1, got {workers}')
        self.tol: float = tol
        self.max_iters: int = max_iters
        self.inner_cfg: WeightedMeanConfig = inner_cfg or WeightedMeanConfig()
        self.max_variables: int = max_variables
        self.workers: int = workers

    def for_inner_level(self) -> 'MultiMeanConfig':
        """
        Configuration of the (n-1)-variable runs nested inside one outer step.

        The tolerance is tightened one decade (floored at INNER_TOL_FLOOR) and inner runs are sequential.

        :return: Inner configuration
        :rtype: MultiMeanConfig
        """
        return MultiMeanConfig(tol=max(self.tol / 10.0, INNER_TOL_FLOOR), max_iters=self.max_iters,
                               inner_cfg=self.inner_cfg, max_variables=self.max_variables, workers=1)

    def weighted_cfg(self) -> WeightedMeanConfig:
        """
        Configuration of the weighted step of BMP, kept two decades below the run tolerance.

        :return: Weighted-mean configuration
        :rtype: WeightedMeanConfig
        """
        return self.inner_cfg.with_tol(min(self.inner_cfg.tol, self.tol * 1e-2))


class IterationTrace:
    """Per-step record of an ALM/BMP run."""

    def __init__(self, method: str, n: int, tol: float) -> None:
        self.method: str = method
        self.n: int = n
        self.tol: float = tol
        self.steps: List[IterationStep] = []
        self.converged: bool = False
        self.limit: Optional[SpdMatrix] = None

    def __str__(self) -> str:
        status = 'converged' if self.converged else 'not converged'
        return f'{self.method} n={self.n}, {len(self.steps)} steps, {status}'

    def __repr__(self) -> str:
        return str(self)

    def __len__(self) -> int:
        return len(self.steps)

    def as_dict(self, full: bool = False) -> Dict[str, Any]:
        """
        Plot-ready representation of the trace.

        :param full: Include every iterate of every step
        :type full: bool
        :return: JSON-serializable dictionary
        :rtype: dict
        """
        steps: List[Dict[str, Any]] = []
        for step in self.steps:
            entry: Dict[str, Any] = {'l': step.l, 'a': step.a, 'e': step.e, 'r_diam': step.r_diam}
            if full:
                entry['iterates'] = [iterate.entries.tolist() for iterate in step.iterates]
            steps.append(entry)
        return {
            'method': self.method,
            'n': self.n,
            'tol': self.tol,
            'converged': self.converged,
            'limit': self.limit.entries.tolist() if self.limit is not None else None,
            'steps': steps,
        }


def _step_statistics(iterates: Sequence[SpdMatrix]) -> Tuple[float, float, float]:
    sum_squares = sum(euclid_dist(0, iterate).value ** 2 for iterate in iterates)
    spread = 0.0
    r_diameter = 0.0
    for i, first in enumerate(iterates):
        for second in iterates[i + 1:]:
            if first is second:
                continue
            spread += euclid_dist(first, second).value ** 2
            r_diameter = max(r_diameter, r_metric(first, second).value - 1.0)
    return sum_squares, spread, r_diameter


def _validate_inputs(matrices: Sequence[SpdMatrix], cfg: MultiMeanConfig) -> None:
    if len(matrices) < 2:
        raise ValueError(f'At least two matrices are needed, got {len(matrices)}')
    if len(matrices) > cfg.max_variables:
        raise TooManyVariables(f'{len(matrices)} variables exceed the cap of {cfg.max_variables}')
    for matrix in matrices[1:]:
        if matrix.dim != matrices[0].dim:
            raise DimensionMismatch(f'Dimension mismatch: {matrices[0].dim} vs {matrix.dim}')


def _run(method: str, kernel: MeanKernel, matrices: Sequence[SpdMatrix],
         cfg: MultiMeanConfig) -> Tuple[SpdMatrix, IterationTrace]:
    _validate_inputs(matrices, cfg)
    count = len(matrices)
    trace = IterationTrace(method, count, cfg.tol)
    iterates: List[SpdMatrix] = list(matrices)

    if count == 2:
        limit = mean2(kernel, iterates[0], iterates[1])
        trace.steps.append(IterationStep(0, iterates, *_step_statistics(iterates)))
        trace.steps.append(IterationStep(1, [limit, limit], 2.0 * euclid_dist(0, limit).value ** 2, 0.0, 0.0))
        trace.converged = True
        trace.limit = limit
        return limit, trace

    scale = sum(iterate.frobenius_norm for iterate in iterates)
    inner_cfg = cfg.for_inner_level()
    weighted_cfg = cfg.weighted_cfg()
    weight = (count - 1) / count

    def update(index: int) -> SpdMatrix:
        others = iterates[:index] + iterates[index + 1:]
        if len(others) == 2:
            sub_mean = mean2(kernel, others[0], others[1])
        else:
            sub_mean, _ = _run(method, kernel, others, inner_cfg)
        if method == IterationMethod.BMP:
            sub_mean, _ = weighted_mean(kernel, weight, iterates[index], sub_mean, weighted_cfg)
        return sub_mean

    for step in range(cfg.max_iters + 1):
        sum_squares, spread, r_diameter = _step_statistics(iterates)
        trace.steps.append(IterationStep(step, iterates, sum_squares, spread, r_diameter))
        LOGGER.debug('%s n=%d step %d: a=%.6e e=%.3e r_diam=%.3e', method, count, step, sum_squares, spread, r_diameter)
        if spread <= (cfg.tol * scale) ** 2 and r_diameter <= cfg.tol:
            trace.converged = True
            trace.limit = iterates[0]
            LOGGER.info('%s n=%d converged after %d steps (r_diam %.3e)', method, count, step, r_diameter)
            return iterates[0], trace
        if step == cfg.max_iters:
            break
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                iterates = list(pool.map(update, range(count)))
        else:
            iterates = [update(index) for index in range(count)]

    LOGGER.warning('%s n=%d did not converge within %d steps (r_diam %.3e)',
                   method, count, cfg.max_iters, trace.steps[-1].r_diam)
    raise MaxItersExceeded(f'{method} did not converge within {cfg.max_iters} steps', trace)


def alm_mean(kernel: MeanKernel, matrices: Sequence[SpdMatrix],
             cfg: Optional[MultiMeanConfig] = None) -> Tuple[SpdMatrix, IterationTrace]:
    """
    ALM symmetrization: every matrix is replaced by the (n-1)-variable mean of the others until they agree.

    The (n-1)-variable mean is itself a converged ALM run, so the recursion is n - 2 levels deep.

    :param kernel: Two-variable symmetric mean
    :type kernel: MeanKernel
    :param matrices: n >= 2 matrices of a common dimension
    :type matrices: list[SpdMatrix]
    :param cfg: Run configuration
    :type cfg: MultiMeanConfig
    :return: Tuple of the common limit and the trace
    :rtype: tuple[SpdMatrix, IterationTrace]
    :raises: MaxItersExceeded, DimensionMismatch, TooManyVariables
    """
    return _run(IterationMethod.ALM, kernel, matrices, cfg or MultiMeanConfig())


def bmp_mean(kernel: MeanKernel, matrices: Sequence[SpdMatrix],
             cfg: Optional[MultiMeanConfig] = None) -> Tuple[SpdMatrix, IterationTrace]:
    """
    BMP symmetrization: every matrix moves to M_{(n-1)/n}(X_i, M(others)) using the weighted-mean process.

    :param kernel: Two-variable symmetric mean
    :type kernel: MeanKernel
    :param matrices: n >= 2 matrices of a common dimension
    :type matrices: list[SpdMatrix]
    :param cfg: Run configuration
    :type cfg: MultiMeanConfig
    :return: Tuple of the common limit and the trace
    :rtype: tuple[SpdMatrix, IterationTrace]
    :raises: MaxItersExceeded, MaxDepthExceeded, DimensionMismatch, TooManyVariables
    """
    return _run(IterationMethod.BMP, kernel, matrices, cfg or MultiMeanConfig())


def multivariate_mean(method: str, kernel: MeanKernel, matrices: Sequence[SpdMatrix],
                      cfg: Optional[MultiMeanConfig] = None) -> Tuple[SpdMatrix, IterationTrace]:
    """Dispatches to alm_mean or bmp_mean by IterationMethod name."""
    if IterationMethod.parse(method) == IterationMethod.ALM:
        return alm_mean(kernel, matrices, cfg)
    return bmp_mean(kernel, matrices, cfg)


def centroid_drift(trace: IterationTrace, pullback: PullbackMean) -> List[float]:
    """
    Frobenius distance of each step's pullback centroid from the starting centroid.

    :param trace: ALM/BMP trace
    :type trace: IterationTrace
    :param pullback: Pullback mean defining the centroid
    :type pullback: PullbackMean
    :return: One drift per recorded step
    :rtype: list[float]
    """
    if not trace.steps:
        return []
    origin = pullback.centroid(trace.steps[0].iterates)
    return [euclid_dist(pullback.centroid(step.iterates), origin).value for step in trace.steps]


def harmonic_nmean(matrices: Sequence[SpdMatrix]) -> SpdMatrix:
    """n-variable harmonic mean (sum X_i^-1 / n)^-1."""
    return HARMONIC_PULLBACK.centroid(matrices)


def arithmetic_nmean(matrices: Sequence[SpdMatrix]) -> SpdMatrix:
    """n-variable arithmetic mean sum X_i / n."""
    return ARITHMETIC_PULLBACK.centroid(matrices)
