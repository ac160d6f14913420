"""
Module containing the empirical checks of the inequalities and convergence rates of the matrix means.

.. module:: diagnostics
   :synopsis:
"""
import logging
from itertools import takewhile
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from symmean.enums import CheckName, IterationMethod, KernelKind
from symmean.mean_kernels import ARITHMETIC_PULLBACK, MeanKernel, k_family_mean, mean2
from symmean.multivariate import (
    IterationTrace, MultiMeanConfig, arithmetic_nmean, centroid_drift, harmonic_nmean, multivariate_mean
)
from symmean.spd_core import MatrixMeanException, SpdMatrix, euclid_dist, loewner_margin
from symmean.utils import random_cluster, random_spd, random_spd_pair
from symmean.weighted_means import WeightedMeanConfig, closed_form_weighted_mean, f_t_eval, weighted_mean

LOGGER = logging.getLogger(__name__)

VIOLATION_SLACK: float = 1e-9
CENTROID_SLACK: float = 1e-8
NOISE_FLOOR_EPS: float = 1e3 * float(np.finfo(float).eps)
STABILITY_REL: float = 0.01
STABILITY_ABS: float = 1e-6
DEFAULT_T_SAMPLES: Tuple[float, ...] = (0.25, 0.5, 0.75)


class InsufficientSteps(MatrixMeanException):
    """Raised when a trace has too few steps above the noise floor to fit a convergence order."""


class UnstableEstimate(MatrixMeanException):
    """Raised when the b2 estimate changes by more than the stability tolerance under stencil halving."""

    def __init__(self, message: str, report: 'ExpansionReport') -> None:
        super().__init__(message)
        self.report: 'ExpansionReport' = report


class RateReport:
    """Fitted convergence order of an ALM/BMP trace."""

    def __init__(
            self,
            method: str,
            kernel: str,
            fitted_order: float,
            window: int,
            residual: float,
            epsilons: List[float],
            low_confidence: bool = False,
    ) -> None:
        self.method: str = method
        self.kernel: str = kernel
        self.fitted_order: float = fitted_order
        self.window: int = window
        self.residual: float = residual
        self.epsilons: List[float] = epsilons
        self.low_confidence: bool = low_confidence

    def __str__(self) -> str:
        return f'{self.method} {self.kernel}: order {self.fitted_order:.3f} over {self.window} pairs'

    def __repr__(self) -> str:
        return str(self)

    def as_dict(self) -> Dict[str, Any]:
        """
        JSON-ready representation.

        :return: Report fields
        :rtype: dict
        """
        return {
            'method': self.method,
            'kernel': self.kernel,
            'fitted_order': self.fitted_order,
            'window': self.window,
            'residual': self.residual,
            'epsilons': self.epsilons,
            'low_confidence': self.low_confidence,
        }


class ExpansionReport:
    """Estimate of the quadratic coefficient b2 of f_t(1 + h) = 1 + t h + 4 b2 t (1 - t) h^2 + O(h^3)."""

    def __init__(
            self,
            kernel: str,
            b2_estimate: float,
            stencil_eps: float,
            t_samples: List[float],
            halved_estimate: float,
            per_sample: List[float],
    ) -> None:
        self.kernel: str = kernel
        self.b2_estimate: float = b2_estimate
        self.stencil_eps: float = stencil_eps
        self.t_samples: List[float] = t_samples
        self.halved_estimate: float = halved_estimate
        self.per_sample: List[float] = per_sample

    @property
    def stable(self) -> bool:
        """
        Whether the estimate agrees with the halved-stencil estimate.

        :return: True within 1% relative plus 1e-6 absolute
        :rtype: bool
        """
        return abs(self.b2_estimate - self.halved_estimate) <= \
            STABILITY_REL * abs(self.halved_estimate) + STABILITY_ABS

    def __str__(self) -> str:
        return f'{self.kernel}: b2 = {self.b2_estimate:.6f}'

    def __repr__(self) -> str:
        return str(self)

    def as_dict(self) -> Dict[str, Any]:
        """
        JSON-ready representation.

        :return: Report fields
        :rtype: dict
        """
        return {
            'kernel': self.kernel,
            'b2_estimate': self.b2_estimate,
            'stencil_eps': self.stencil_eps,
            't_samples': self.t_samples,
            'halved_estimate': self.halved_estimate,
            'per_sample': self.per_sample,
            'stable': self.stable,
        }


class VerificationReport:
    """Outcome of a sampled inequality or invariance check; violations are content, not errors."""

    def __init__(self, check: str, kernel: str, samples: int) -> None:
        self.check: str = check
        self.kernel: str = kernel
        self.samples: int = samples
        self.violations: int = 0
        self.worst_margins: Dict[str, float] = {}
        self.details: Dict[str, Any] = {}

    def record(self, name: str, margin: float, slack: float = VIOLATION_SLACK) -> None:
        """
        Records one margin; negative margins beyond the slack count as violations.

        :param name: Which inequality the margin belongs to
        :type name: str
        :param margin: Normalized margin, non-negative when the inequality holds
        :type margin: float
        :param slack: Tolerated negative margin
        :type slack: float
        """
        self.worst_margins[name] = min(self.worst_margins.get(name, float('inf')), margin)
        if margin < -slack:
            self.violations += 1

    @property
    def passed(self) -> bool:
        """
        True when no sample violated the checked inequality.

        :return: Verdict
        :rtype: bool
        """
        return self.violations == 0

    def __str__(self) -> str:
        return f'{self.check} {self.kernel}: {self.violations} violations in {self.samples} samples'

    def __repr__(self) -> str:
        return str(self)

    def as_dict(self) -> Dict[str, Any]:
        """
        JSON-ready representation.

        :return: Report fields
        :rtype: dict
        """
        return {
            'check': self.check,
            'kernel': self.kernel,
            'samples': self.samples,
            'violations': self.violations,
            'passed': self.passed,
            'worst_margins': self.worst_margins,
            'details': self.details,
        }


def fit_order(epsilons: Sequence[float], window: int = 4) -> Tuple[float, float]:
    """
    Least-squares slope of log eps_{l+1} against log eps_l over the last `window` pairs.

    :param epsilons: Positive error sequence
    :type epsilons: list[float]
    :param window: Number of (eps_l, eps_{l+1}) pairs used
    :type window: int
    :return: Tuple of fitted order and the sum of squared residuals
    :rtype: tuple[float, float]
    :raises: InsufficientSteps when fewer than two pairs are available
    """
    if len(epsilons) < 3:
        raise InsufficientSteps(f'Need at least three errors above the noise floor, got {len(epsilons)}')
    logs = np.log(np.asarray(epsilons[-(window + 1):], dtype=float))
    coefficients, residuals, _, _, _ = np.polyfit(logs[:-1], logs[1:], 1, full=True)
    residual = float(residuals[0]) if len(residuals) else 0.0
    return float(coefficients[0]), residual


def estimate_order(trace: IterationTrace, window: int = 4, kernel: str = '') -> RateReport:
    """
    Fits the convergence order of a converged ALM/BMP trace.

    eps_l is the largest Frobenius distance of an iterate to the limit. Errors at or below
    max(1e3 * machine epsilon, 10 * trace.tol) times the input scale are discarded.

    :param trace: Converged trace
    :type trace: IterationTrace
    :param window: Number of pairs fitted
    :type window: int
    :param kernel: Kernel label for the report
    :type kernel: str
    :return: Rate report
    :rtype: RateReport
    :raises: InsufficientSteps
    """
    if window < 2:
        raise ValueError(f'window must be at least 2, got {window}')
    if not trace.converged or trace.limit is None:
        raise InsufficientSteps('Only converged traces have a limit to measure errors against.')
    limit = trace.limit.entries
    epsilons = [max(float(np.linalg.norm(iterate.entries - limit, 'fro')) for iterate in step.iterates)
                for step in trace.steps]
    scale = sum(iterate.frobenius_norm for iterate in trace.steps[0].iterates)
    floor = max(NOISE_FLOOR_EPS, 10.0 * trace.tol) * scale
    usable = list(takewhile(lambda value: value > floor, epsilons))
    order, residual = fit_order(usable, window)
    pairs = min(window, len(usable) - 1)
    report = RateReport(trace.method, kernel, order, pairs, residual, epsilons, low_confidence=pairs < window)
    if report.low_confidence:
        LOGGER.warning('Order fitted from %d pairs only (window %d): %.3f', pairs, window, order)
    return report


def _stencil_coefficient(kernel: MeanKernel, t: float, step: float, cfg: WeightedMeanConfig) -> float:
    second_difference = f_t_eval(kernel, t, 1.0 + step, cfg) + f_t_eval(kernel, t, 1.0 - step, cfg) - 2.0
    return second_difference / (8.0 * t * (1.0 - t) * step ** 2)


def _richardson_b2(kernel: MeanKernel, t: float, step: float, cfg: WeightedMeanConfig) -> float:
    return (4.0 * _stencil_coefficient(kernel, t, step, cfg) - _stencil_coefficient(kernel, t, 2.0 * step, cfg)) / 3.0


def estimate_b2(
        kernel: MeanKernel,
        cfg: Optional[WeightedMeanConfig] = None,
        stencil_eps: float = 1e-2,
        t_samples: Sequence[float] = DEFAULT_T_SAMPLES,
) -> ExpansionReport:
    """
    Estimates b2 from scalar evaluations of f_t at 1 +- eps and 1 +- 2 eps.

    The second differences at both widths are combined so the h^2 error term cancels,
    averaged over t_samples, and compared with the same estimate at eps / 2.
    The reported value is signed.

    :param kernel: Symmetric mean
    :type kernel: MeanKernel
    :param cfg: Weighted-mean process configuration
    :type cfg: WeightedMeanConfig
    :param stencil_eps: Stencil width eps
    :type stencil_eps: float
    :param t_samples: Weights in (0, 1)
    :type t_samples: list[float]
    :return: Expansion report
    :rtype: ExpansionReport
    :raises: UnstableEstimate
    """
    cfg = cfg or WeightedMeanConfig()
    if not 0.0 < stencil_eps < 0.25:
        raise ValueError(f'stencil_eps must lie in (0, 0.25), got {stencil_eps}')
    samples = [float(t) for t in t_samples]
    if not samples or any(not 0.0 < t < 1.0 for t in samples):
        raise ValueError(f't_samples must be non-empty and inside (0, 1), got {samples}')

    per_sample = [_richardson_b2(kernel, t, stencil_eps, cfg) for t in samples]
    halved = [_richardson_b2(kernel, t, stencil_eps / 2.0, cfg) for t in samples]
    report = ExpansionReport(kernel.label, float(np.mean(per_sample)), stencil_eps, samples,
                             float(np.mean(halved)), per_sample)
    if not report.stable:
        raise UnstableEstimate(f'b2 estimate {report.b2_estimate!r} moved to {report.halved_estimate!r} '
                               f'when halving the stencil', report)
    return report


def verify_sandwich(kernel: MeanKernel, samples: int = 100, dim: int = 3, seed: int = 0,
                    t: float = 0.5) -> VerificationReport:
    """
    Samples H_t(A, B) <= M_t(A, B) <= A_t(A, B) in the Loewner order.

    At t = 1/2 the kernel's own mean is checked; otherwise the weighted-mean process.

    :param kernel: Kubo-Ando kernel
    :type kernel: MeanKernel
    :param samples: Number of random pairs
    :type samples: int
    :param dim: Matrix dimension
    :type dim: int
    :param seed: Generator seed
    :type seed: int
    :param t: Weight in [0, 1]
    :type t: float
    :return: Report with the worst lower and upper margins
    :rtype: VerificationReport
    """
    rng = np.random.default_rng(seed)
    harmonic = MeanKernel(KernelKind.HARMONIC)
    arithmetic = MeanKernel(KernelKind.ARITHMETIC)
    report = VerificationReport(CheckName.SANDWICH, kernel.label, samples)
    report.details['t'] = t
    for _ in range(samples):
        first, second = random_spd_pair(rng, dim)
        if t == 0.5:
            middle = mean2(kernel, first, second)
        else:
            middle, _ = weighted_mean(kernel, t, first, second)
        report.record('lower', loewner_margin(closed_form_weighted_mean(harmonic, t, first, second), middle))
        report.record('upper', loewner_margin(middle, closed_form_weighted_mean(arithmetic, t, first, second)))
    return report


def verify_trace_inequality(kernel: MeanKernel, k: float = 2.0, t: float = 0.5, samples: int = 100,
                            dim: int = 3, seed: int = 0) -> VerificationReport:
    """
    Samples ||F||^2 <= (1-t)||A||^2 + t||B||^2 - (k/2) t (1-t) ||A - B||^2 for F = M_t(A, B).

    Margins are normalized by (1-t)||A||^2 + t||B||^2.

    :param kernel: Kernel bounded above by the k-family mean of parameter k
    :type kernel: MeanKernel
    :param k: Family parameter in [0, 2]
    :type k: float
    :param t: Weight in [0, 1]
    :type t: float
    :param samples: Number of random pairs
    :type samples: int
    :param dim: Matrix dimension
    :type dim: int
    :param seed: Generator seed
    :type seed: int
    :return: Report with the worst margin
    :rtype: VerificationReport
    """
    rng = np.random.default_rng(seed)
    report = VerificationReport(CheckName.TRACE_INEQUALITY, kernel.label, samples)
    report.details.update({'k': k, 't': t})
    for _ in range(samples):
        first, second = random_spd_pair(rng, dim)
        if kernel.kind in (KernelKind.K_FAMILY, KernelKind.SQUARE):
            combined = k_family_mean(kernel.k or 0.0, t, first, second)
        else:
            combined, _ = weighted_mean(kernel, t, first, second)
        baseline = (1.0 - t) * first.frobenius_norm ** 2 + t * second.frobenius_norm ** 2
        bound = baseline - (k / 2.0) * t * (1.0 - t) * euclid_dist(first, second).value ** 2
        report.record('trace', (bound - combined.frobenius_norm ** 2) / baseline)
    return report


def lyapunov_rate(method: str, count: int) -> float:
    """
    Contraction constant z_n of the Lyapunov inequality.

    :param method: ALM or BMP
    :type method: str
    :param count: Number of variables n >= 2
    :type count: int
    :return: 2/(n-1) for ALM, 4/((n-1) n) for BMP
    :rtype: float
    """
    if IterationMethod.parse(method) == IterationMethod.ALM:
        return 2.0 / (count - 1)
    return 4.0 / ((count - 1) * count)


def verify_decreasing_distances(trace: IterationTrace, k: float = 2.0) -> VerificationReport:
    """
    Checks a^{l+1} <= a^l - (k/8) z_n e^l along a trace, with slack 1e-9 a^0.

    :param trace: ALM/BMP trace
    :type trace: IterationTrace
    :param k: Family parameter bounding the kernel
    :type k: float
    :return: Report over the trace's consecutive steps
    :rtype: VerificationReport
    """
    report = VerificationReport(CheckName.LYAPUNOV, trace.method, max(len(trace.steps) - 1, 0))
    if not trace.steps:
        return report
    rate = lyapunov_rate(trace.method, trace.n)
    initial = trace.steps[0].a
    report.details.update({'z_n': rate, 'k': k, 'a': [step.a for step in trace.steps]})
    for previous, current in zip(trace.steps, trace.steps[1:]):
        bound = previous.a - (k / 8.0) * rate * previous.e
        report.record('lyapunov', (bound - current.a) / initial)
    return report


def verify_monotone_iteration(trace: IterationTrace) -> VerificationReport:
    """
    Checks that the n-variable harmonic mean of the iterates never decreases
    and the arithmetic mean never increases.

    :param trace: ALM/BMP trace of a Kubo-Ando kernel
    :type trace: IterationTrace
    :return: Report over the trace's consecutive steps
    :rtype: VerificationReport
    """
    report = VerificationReport('monotone', trace.method, max(len(trace.steps) - 1, 0))
    for previous, current in zip(trace.steps, trace.steps[1:]):
        report.record('harmonic', loewner_margin(harmonic_nmean(previous.iterates), harmonic_nmean(current.iterates)))
        report.record('arithmetic',
                      loewner_margin(arithmetic_nmean(current.iterates), arithmetic_nmean(previous.iterates)))
    return report


def _seeded_inputs(count: int, dim: int, seed: int) -> List[SpdMatrix]:
    rng = np.random.default_rng(seed)
    return [random_spd(rng, dim) for _ in range(count)]


def verify_lyapunov(kernel: MeanKernel, method: str, n: int = 3, dim: int = 3, seed: int = 0,
                    cfg: Optional[MultiMeanConfig] = None, k: float = 2.0) -> VerificationReport:
    """
    Runs the engine on seeded inputs and checks the decreasing-distances inequality,
    with the monotone-iteration verdict attached to the details.

    :param kernel: Kubo-Ando kernel
    :type kernel: MeanKernel
    :param method: ALM or BMP
    :type method: str
    :param n: Number of variables
    :type n: int
    :param dim: Matrix dimension
    :type dim: int
    :param seed: Generator seed
    :type seed: int
    :param cfg: Run configuration
    :type cfg: MultiMeanConfig
    :param k: Family parameter bounding the kernel
    :type k: float
    :return: Report
    :rtype: VerificationReport
    """
    _, trace = multivariate_mean(method, kernel, _seeded_inputs(n, dim, seed), cfg)
    report = verify_decreasing_distances(trace, k)
    report.kernel = kernel.label
    monotone = verify_monotone_iteration(trace)
    report.details.update({'method': trace.method, 'n': n, 'monotone_violations': monotone.violations,
                           'monotone_margins': monotone.worst_margins})
    return report


def verify_centroid(kernel: MeanKernel, method: str, n: int = 3, dim: int = 3, seed: int = 0,
                    cfg: Optional[MultiMeanConfig] = None) -> VerificationReport:
    """
    Runs the engine on seeded inputs and measures the drift of the kernel's pullback centroid.

    Kernels without a matching pullback are measured against the arithmetic centroid,
    where no invariance is expected.

    :param kernel: Symmetric mean
    :type kernel: MeanKernel
    :param method: ALM or BMP
    :type method: str
    :param n: Number of variables
    :type n: int
    :param dim: Matrix dimension
    :type dim: int
    :param seed: Generator seed
    :type seed: int
    :param cfg: Run configuration
    :type cfg: MultiMeanConfig
    :return: Report whose margin is the negated relative drift
    :rtype: VerificationReport
    """
    inputs = _seeded_inputs(n, dim, seed)
    _, trace = multivariate_mean(method, kernel, inputs, cfg)
    pullback = kernel.pullback or ARITHMETIC_PULLBACK
    scale = sum(matrix.frobenius_norm for matrix in inputs)
    drifts = centroid_drift(trace, pullback)
    report = VerificationReport(CheckName.CENTROID, kernel.label, len(drifts))
    report.details.update({'method': trace.method, 'n': n, 'pullback': str(pullback),
                           'invariance_expected': kernel.pullback is not None, 'drifts': drifts})
    for drift in drifts:
        report.record('drift', -drift / scale, CENTROID_SLACK)
    return report


def verify_order(method: str, kernel: MeanKernel, n: int = 3, dim: int = 3, seed: int = 0,
                 spread: float = 0.5, cfg: Optional[MultiMeanConfig] = None, window: int = 4) -> RateReport:
    """
    Runs the engine on a seeded cluster of matrices and fits the convergence order.

    :param method: ALM or BMP
    :type method: str
    :param kernel: Symmetric mean
    :type kernel: MeanKernel
    :param n: Number of variables
    :type n: int
    :param dim: Matrix dimension
    :type dim: int
    :param seed: Generator seed
    :type seed: int
    :param spread: Cluster spread in (0, 1); pairwise R stays below (1 + spread) / (1 - spread)
    :type spread: float
    :param cfg: Run configuration, tight by default so the fit sees several steps
    :type cfg: MultiMeanConfig
    :param window: Number of pairs fitted
    :type window: int
    :return: Rate report
    :rtype: RateReport
    :raises: InsufficientSteps
    """
    rng = np.random.default_rng(seed)
    inputs = random_cluster(rng, n, dim, spread)
    _, trace = multivariate_mean(method, kernel, inputs, cfg or MultiMeanConfig(tol=1e-13))
    return estimate_order(trace, window, kernel.label)
