"""
Module containing the dyadic weighted-mean process that turns a symmetric mean M(A, B) into its weighted form M_t(A, B).

.. module:: weighted_means
   :synopsis:
"""
import logging
from collections import namedtuple
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from symmean.enums import KernelKind
from symmean.mean_kernels import KernelError, MeanKernel, QUADRATIC_PULLBACK, mean2
from symmean.spd_core import (
    DimensionMismatch, MatrixMeanException, SpdMatrix, r_metric, spectral_array, validate_spd
)
from symmean.utils import dyadic_depth

LOGGER = logging.getLogger(__name__)

WeightedStep = namedtuple('WeightedStep', ['step', 'a', 'b', 'A_n', 'B_n', 'r_gap'])


class MaxDepthExceeded(MatrixMeanException):
    """Raised when the weighted-mean process does not reach its tolerance within max_depth steps."""

    def __init__(self, message: str, steps: List[WeightedStep]) -> None:
        super().__init__(message)
        self.steps: List[WeightedStep] = steps


class WeightedMeanConfig:
    """Stopping rule and depth cap of the weighted-mean process."""

    def __init__(
            self,
            tol: float = 1e-12,
            max_depth: int = 64,
            dyadic_shortcut: bool = True,
    ) -> None:
        if not tol > 0:
            raise ValueError(f'tol must be positive, got {tol}')
        if max_depth < 1:
            raise ValueError(f'max_depth must be at least 1, got {max_depth}')
        self.tol: float = tol
        self.max_depth: int = max_depth
        self.dyadic_shortcut: bool = dyadic_shortcut

    def with_tol(self, tol: float) -> 'WeightedMeanConfig':
        """
        Copy of the configuration with another tolerance.

        :param tol: New stopping threshold on R(A_n, B_n) - 1
        :type tol: float
        :return: New configuration
        :rtype: WeightedMeanConfig
        """
        return WeightedMeanConfig(tol=tol, max_depth=self.max_depth, dyadic_shortcut=self.dyadic_shortcut)

    def __repr__(self) -> str:
        return f'WeightedMeanConfig(tol={self.tol!r}, max_depth={self.max_depth}, ' \
               f'dyadic_shortcut={self.dyadic_shortcut})'


def _r_gap(first: SpdMatrix, second: SpdMatrix) -> float:
    if first is second:
        return 0.0
    return r_metric(first, second).value - 1.0


def weighted_mean(
        kernel: MeanKernel,
        t: float,
        first: SpdMatrix,
        second: SpdMatrix,
        cfg: Optional[WeightedMeanConfig] = None,
) -> Tuple[SpdMatrix, List[WeightedStep]]:
    """
    Runs the dyadic binary search producing M_t(A, B) from the symmetric mean M.

    Starting from [a, b] = [0, 1] with iterates (A, B), each step either collapses onto an endpoint equal to t,
    or replaces the iterate on the far side of t by M(A_n, B_n) and halves the interval. The process stops when
    R(A_n, B_n) - 1 <= tol, or at an exact dyadic hit when ``dyadic_shortcut`` is set.

    :param kernel: Symmetric mean M
    :type kernel: MeanKernel
    :param t: Weight in [0, 1]
    :type t: float
    :param first: Matrix A (the t = 0 end)
    :type first: SpdMatrix
    :param second: Matrix B (the t = 1 end)
    :type second: SpdMatrix
    :param cfg: Process configuration
    :type cfg: WeightedMeanConfig
    :return: Tuple of M_t(A, B) and the per-step trace
    :rtype: tuple[SpdMatrix, list[WeightedStep]]
    :raises: MaxDepthExceeded, DimensionMismatch
    """
    cfg = cfg or WeightedMeanConfig()
    if not 0.0 <= t <= 1.0:
        raise ValueError(f't must lie in [0, 1], got {t}')
    if first.dim != second.dim:
        raise DimensionMismatch(f'Dimension mismatch: {first.dim} vs {second.dim}')

    target = t
    exact_hit = False
    if cfg.dyadic_shortcut:
        dyadic = dyadic_depth(t, cfg.max_depth)
        if dyadic is not None:
            numerator, depth = dyadic
            target = numerator / 2.0 ** depth
            exact_hit = True

    low, high = 0.0, 1.0
    a_matrix, b_matrix = first, second
    steps: List[WeightedStep] = []
    for step in range(cfg.max_depth + 1):
        r_gap = _r_gap(a_matrix, b_matrix)
        steps.append(WeightedStep(step, low, high, a_matrix, b_matrix, r_gap))
        LOGGER.debug('weighted mean %s t=%r step %d: [%r, %r] r_gap=%.3e', kernel, t, step, low, high, r_gap)
        if exact_hit and low == target:
            return a_matrix, steps
        if exact_hit and high == target:
            return b_matrix, steps
        if r_gap <= cfg.tol:
            return a_matrix, steps
        if step == cfg.max_depth:
            break

        midpoint = (low + high) / 2.0
        if low == target:
            high, b_matrix = low, a_matrix
        elif high == target:
            low, a_matrix = high, b_matrix
        elif midpoint <= target:
            low, a_matrix = midpoint, mean2(kernel, a_matrix, b_matrix)
        else:
            high, b_matrix = midpoint, mean2(kernel, a_matrix, b_matrix)

    LOGGER.warning('Weighted mean %s at t=%r did not reach tol %.3e within %d steps',
                   kernel, t, cfg.tol, cfg.max_depth)
    raise MaxDepthExceeded(f'Weighted mean did not reach tol {cfg.tol:g} within {cfg.max_depth} steps '
                           f'(last r_gap {steps[-1].r_gap:.3e})', steps)


def weighted_trace_as_dict(
        kernel: MeanKernel,
        t: float,
        steps: Sequence[WeightedStep],
        converged: bool,
        full: bool = False,
) -> Dict[str, Any]:
    """
    Plot-ready representation of a weighted-mean trace.

    :param kernel: Symmetric mean M
    :type kernel: MeanKernel
    :param t: Requested weight
    :type t: float
    :param steps: Steps returned by weighted_mean or carried by MaxDepthExceeded
    :type steps: list[WeightedStep]
    :param converged: Whether the process reached its stopping rule
    :type converged: bool
    :param full: Include the iterate pair of every step
    :type full: bool
    :return: JSON-serializable dictionary
    :rtype: dict
    """
    entries: List[Dict[str, Any]] = []
    for step in steps:
        entry: Dict[str, Any] = {'step': step.step, 'a': step.a, 'b': step.b, 'r_gap': step.r_gap}
        if full:
            entry['iterates'] = [step.A_n.entries.tolist(), step.B_n.entries.tolist()]
        entries.append(entry)
    return {'kernel': kernel.label, 't': t, 'converged': converged, 'steps': entries}


def f_t_eval(kernel: MeanKernel, t: float, x: float, cfg: Optional[WeightedMeanConfig] = None) -> float:
    """
    Scalar generator f_t(x) = M_t(1, x) of the weighted family.

    :param kernel: Symmetric mean M
    :type kernel: MeanKernel
    :param t: Weight in [0, 1]
    :type t: float
    :param x: Positive argument
    :type x: float
    :param cfg: Process configuration
    :type cfg: WeightedMeanConfig
    :return: f_t(x)
    :rtype: float
    """
    if not x > 0:
        raise ValueError(f'f_t is defined on positive reals only, got {x}')
    result, _ = weighted_mean(kernel, t, validate_spd([[1.0]]), validate_spd([[x]]), cfg)
    return float(result.entries[0, 0])


def closed_form_weighted_mean(kernel: MeanKernel, t: float, first: SpdMatrix, second: SpdMatrix) -> SpdMatrix:
    """
    Closed-form weighted means for the kernels whose weighted counterpart is known in advance.

    Arithmetic: (1-t) A + t B. Harmonic: ((1-t) A^-1 + t B^-1)^-1.
    Geometric: A^(1/2) (A^(-1/2) B A^(-1/2))^t A^(1/2). Square: ((1-t) A^2 + t B^2)^(1/2).

    :param kernel: Symmetric mean M
    :type kernel: MeanKernel
    :param t: Weight in [0, 1]
    :type t: float
    :param first: Matrix A
    :type first: SpdMatrix
    :param second: Matrix B
    :type second: SpdMatrix
    :return: Weighted mean
    :rtype: SpdMatrix
    :raises: KernelError for kernels without a closed form
    """
    if first.dim != second.dim:
        raise DimensionMismatch(f'Dimension mismatch: {first.dim} vs {second.dim}')
    if kernel.kind == KernelKind.ARITHMETIC:
        return validate_spd((1.0 - t) * first.entries + t * second.entries)
    if kernel.kind == KernelKind.HARMONIC:
        combined = (1.0 - t) * spectral_array(first, lambda x: 1.0 / x) + t * spectral_array(second, lambda x: 1.0 / x)
        return validate_spd(np.linalg.inv(combined))
    if kernel.kind == KernelKind.GEOMETRIC:
        root = spectral_array(first, np.sqrt)
        inverse_root = spectral_array(first, lambda x: 1.0 / np.sqrt(x))
        whitened = validate_spd(inverse_root @ second.entries @ inverse_root)
        return validate_spd(root @ spectral_array(whitened, lambda x: np.power(x, t)) @ root)
    if kernel.kind == KernelKind.SQUARE:
        return QUADRATIC_PULLBACK.weighted2(t, first, second)
    raise KernelError(f'No closed-form weighted mean for kernel {kernel}')
