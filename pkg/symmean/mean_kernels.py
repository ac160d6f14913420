"""
Module containing the catalog of two-variable symmetric matrix means and the pullback centroid means.

.. module:: mean_kernels
   :synopsis:
"""
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from symmean.enums import KernelKind
from symmean.spd_core import (
    DimensionMismatch, IDENTITY, INVERSE, MatrixMeanException, SQUARE, SpdMatrix, SpectralFunction, spectral_array,
    validate_spd
)

LOG_SERIES_RADIUS: float = 1e-6
NORMALIZATION_TOL: float = 1e-12


class KernelError(MatrixMeanException):
    """Raised for invalid kernel descriptors and unknown kernel names."""


class WeightError(MatrixMeanException):
    """Raised when convex weights are negative, mis-sized, or do not sum to one."""


def _logarithmic_generator(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    offset = values - 1.0
    near_one = np.abs(offset) < LOG_SERIES_RADIUS
    # Removable singularity at 1: (x - 1) / ln x = 1 + u/2 - u^2/12 + u^3/24 - ...
    series = 1.0 + offset / 2.0 - offset ** 2 / 12.0 + offset ** 3 / 24.0
    safe = np.where(near_one, 2.0, values)
    direct = (safe - 1.0) / np.log(safe)
    return np.where(near_one, series, direct)


LOGARITHMIC_GENERATOR = SpectralFunction(_logarithmic_generator, 'logarithmic')


class PullbackMean:
    """Centroid mean f^-1(sum w_i f(X_i)) for an isometry f with a tracked inverse."""

    def __init__(self, isometry: SpectralFunction) -> None:
        if isometry.inverse is None:
            raise KernelError(f'Pullback isometry {isometry.label} has no inverse.')
        samples = np.array([0.125, 0.5, 1.0, 3.0, 17.0])
        round_trip = isometry.inverse(isometry(samples))
        if not np.allclose(round_trip, samples, rtol=1e-12, atol=0.0):
            raise KernelError(f'Inverse of {isometry.label} does not invert it.')
        self.isometry: SpectralFunction = isometry

    def __str__(self) -> str:
        return f'pullback({self.isometry.label})'

    def __repr__(self) -> str:
        return str(self)

    def weighted2(self, t: float, first: SpdMatrix, second: SpdMatrix) -> SpdMatrix:
        """
        Weighted two-point pullback mean f^-1((1-t) f(A) + t f(B)).

        :param t: Weight in [0, 1]
        :type t: float
        :param first: Matrix A
        :type first: SpdMatrix
        :param second: Matrix B
        :type second: SpdMatrix
        :return: Weighted pullback mean
        :rtype: SpdMatrix
        """
        return pullback_nmean(self, [1.0 - t, t], [first, second])

    def centroid(self, matrices: Sequence[SpdMatrix]) -> SpdMatrix:
        """
        Uniformly weighted centroid of the matrices.

        :param matrices: Points of the cone
        :type matrices: list[SpdMatrix]
        :return: Riemann centroid for the pulled-back flat metric
        :rtype: SpdMatrix
        """
        count = len(matrices)
        return pullback_nmean(self, [1.0 / count] * count, matrices)


ARITHMETIC_PULLBACK = PullbackMean(IDENTITY)
HARMONIC_PULLBACK = PullbackMean(INVERSE)
QUADRATIC_PULLBACK = PullbackMean(SQUARE)


class MeanKernel:
    """Descriptor of a symmetric two-variable matrix mean."""

    KUBO_ANDO_KINDS = (KernelKind.ARITHMETIC, KernelKind.HARMONIC, KernelKind.GEOMETRIC,
                       KernelKind.LOGARITHMIC, KernelKind.GENERATOR)

    def __init__(
            self,
            kind: str,
            label: Optional[str] = None,
            generator: Optional[SpectralFunction] = None,
            k: Optional[float] = None,
    ) -> None:
        if kind == KernelKind.GENERATOR:
            if generator is None:
                raise KernelError('Generator kernels need a generator function.')
            at_one = float(generator(np.array([1.0]))[0])
            if abs(at_one - 1.0) > NORMALIZATION_TOL:
                raise KernelError(f'Generator {generator.label} is not normalized: f(1) = {at_one!r}')
        elif kind == KernelKind.K_FAMILY:
            if k is None or not 0.0 < k <= 2.0:
                raise KernelError(f'k-family kernels need k in (0, 2], got {k}')
        elif kind not in (KernelKind.ARITHMETIC, KernelKind.HARMONIC, KernelKind.GEOMETRIC,
                          KernelKind.LOGARITHMIC, KernelKind.SQUARE):
            raise KernelError(f'Unknown kernel kind "{kind}"')
        self.kind: str = kind
        self.generator: Optional[SpectralFunction] = generator
        self.k: Optional[float] = 0.0 if kind == KernelKind.SQUARE else k
        self.label: str = label or self._default_label()

    def _default_label(self) -> str:
        if self.kind == KernelKind.K_FAMILY:
            return f'{KernelKind.K_FAMILY}:{self.k:g}'
        if self.kind == KernelKind.GENERATOR and self.generator is not None:
            return f'{KernelKind.GENERATOR}:{self.generator.label}'
        return self.kind

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f'MeanKernel({self.label})'

    @classmethod
    def from_name(cls, name: str) -> 'MeanKernel':
        """
        Parses a command-line kernel name.

        Accepted names are "arithmetic", "harmonic", "geometric", "logarithmic", "square" and "kfamily:<k>".

        :param name: Kernel name
        :type name: str
        :return: Kernel descriptor
        :rtype: MeanKernel
        :raises: KernelError
        """
        normalized = name.strip().lower()
        if normalized.startswith(KernelKind.K_FAMILY + ':'):
            try:
                k_value = float(normalized.split(':', 1)[1])
            except ValueError as error:
                raise KernelError(f'Could not read k from kernel name "{name}"') from error
            return cls(KernelKind.K_FAMILY, k=k_value)
        if normalized in (KernelKind.ARITHMETIC, KernelKind.HARMONIC, KernelKind.GEOMETRIC,
                          KernelKind.LOGARITHMIC, KernelKind.SQUARE):
            return cls(normalized)
        raise KernelError(f'Unknown kernel name "{name}"')

    @property
    def is_kubo_ando(self) -> bool:
        """
        Whether the kernel is a Kubo-Ando mean, hence bracketed by the harmonic and arithmetic means.

        :return: True for operator-monotone-generated kernels
        :rtype: bool
        """
        return self.kind in self.KUBO_ANDO_KINDS

    @property
    def pullback(self) -> Optional[PullbackMean]:
        """
        Pullback mean whose two-point centroid coincides with this kernel, if any.

        :return: Matching pullback mean or None
        :rtype: NoneType|PullbackMean
        """
        matches: Dict[str, PullbackMean] = {
            KernelKind.ARITHMETIC: ARITHMETIC_PULLBACK,
            KernelKind.HARMONIC: HARMONIC_PULLBACK,
            KernelKind.SQUARE: QUADRATIC_PULLBACK,
        }
        return matches.get(self.kind)

    def generator_function(self) -> SpectralFunction:
        """
        Normalized scalar generator f(x) = M(1, x) of the kernel.

        :return: Scalar generator
        :rtype: SpectralFunction
        """
        if self.kind == KernelKind.ARITHMETIC:
            return SpectralFunction(lambda x: (1.0 + x) / 2.0, 'arithmetic')
        if self.kind == KernelKind.HARMONIC:
            return SpectralFunction(lambda x: 2.0 * x / (1.0 + x), 'harmonic')
        if self.kind == KernelKind.GEOMETRIC:
            return SpectralFunction(np.sqrt, 'geometric')
        if self.kind == KernelKind.LOGARITHMIC:
            return LOGARITHMIC_GENERATOR
        if self.kind == KernelKind.GENERATOR and self.generator is not None:
            return self.generator
        k_value = self.k or 0.0
        return SpectralFunction(
            lambda x: np.sqrt((1.0 + x ** 2) / 2.0 - k_value / 8.0 * (1.0 - x) ** 2), self.label
        )


ARITHMETIC = MeanKernel(KernelKind.ARITHMETIC)
HARMONIC = MeanKernel(KernelKind.HARMONIC)
GEOMETRIC = MeanKernel(KernelKind.GEOMETRIC)
LOGARITHMIC = MeanKernel(KernelKind.LOGARITHMIC)
SQUARE_MEAN = MeanKernel(KernelKind.SQUARE)


def _check_pair(first: SpdMatrix, second: SpdMatrix) -> None:
    if first.dim != second.dim:
        raise DimensionMismatch(f'Dimension mismatch: {first.dim} vs {second.dim}')


def _congruence_form(first: SpdMatrix, second: SpdMatrix, function: Callable[[np.ndarray], np.ndarray]) -> SpdMatrix:
    root = spectral_array(first, np.sqrt)
    inverse_root = spectral_array(first, lambda x: 1.0 / np.sqrt(x))
    whitened = validate_spd(inverse_root @ second.entries @ inverse_root)
    return validate_spd(root @ spectral_array(whitened, function) @ root)


def mean2(kernel: MeanKernel, first: SpdMatrix, second: SpdMatrix) -> SpdMatrix:
    """
    Evaluates a symmetric two-variable mean M(A, B).

    Kubo-Ando kernels use A^(1/2) f(A^(-1/2) B A^(-1/2)) A^(1/2); the closed-form kernels use their own formulas.

    :param kernel: Mean descriptor
    :type kernel: MeanKernel
    :param first: Matrix A
    :type first: SpdMatrix
    :param second: Matrix B
    :type second: SpdMatrix
    :return: M(A, B)
    :rtype: SpdMatrix
    :raises: DimensionMismatch, NonPositiveResult
    """
    _check_pair(first, second)
    if kernel.kind == KernelKind.ARITHMETIC:
        return validate_spd((first.entries + second.entries) / 2.0)
    if kernel.kind == KernelKind.HARMONIC:
        average_inverse = (spectral_array(first, lambda x: 1.0 / x) + spectral_array(second, lambda x: 1.0 / x)) / 2.0
        return validate_spd(np.linalg.inv(average_inverse))
    if kernel.kind == KernelKind.GEOMETRIC:
        return _congruence_form(first, second, np.sqrt)
    if kernel.kind in (KernelKind.K_FAMILY, KernelKind.SQUARE):
        return k_family_mean(kernel.k or 0.0, 0.5, first, second)
    return _congruence_form(first, second, kernel.generator_function())


def k_family_mean(k: float, t: float, first: SpdMatrix, second: SpdMatrix) -> SpdMatrix:
    """
    Evaluates [(1-t) A^2 + t B^2 - (k/2) t (1-t) (A-B)^2]^(1/2).

    k = 2 gives the weighted arithmetic mean and k = 0 the weighted square mean.

    :param k: Family parameter in [0, 2]
    :type k: float
    :param t: Weight in [0, 1]
    :type t: float
    :param first: Matrix A
    :type first: SpdMatrix
    :param second: Matrix B
    :type second: SpdMatrix
    :return: k-family mean
    :rtype: SpdMatrix
    :raises: NotPositiveDefinite when the inner matrix is not positive definite
    """
    if not 0.0 <= k <= 2.0:
        raise KernelError(f'k must lie in [0, 2], got {k}')
    if not 0.0 <= t <= 1.0:
        raise ValueError(f't must lie in [0, 1], got {t}')
    _check_pair(first, second)
    a_matrix = first.entries
    b_matrix = second.entries
    difference = a_matrix - b_matrix
    inner = (1.0 - t) * a_matrix @ a_matrix + t * b_matrix @ b_matrix \
        - (k / 2.0) * t * (1.0 - t) * difference @ difference
    return validate_spd(spectral_array(validate_spd(inner), np.sqrt))


def pullback_nmean(pullback: PullbackMean, weights: Sequence[float], matrices: Sequence[SpdMatrix]) -> SpdMatrix:
    """
    Weighted pullback mean f^-1(sum w_i f(X_i)).

    :param pullback: Pullback descriptor (isometry f with inverse)
    :type pullback: PullbackMean
    :param weights: Non-negative weights summing to one
    :type weights: list[float]
    :param matrices: Matrices X_i of a common dimension
    :type matrices: list[SpdMatrix]
    :return: Weighted pullback mean
    :rtype: SpdMatrix
    :raises: WeightError, DimensionMismatch
    """
    weight_list: List[float] = [float(weight) for weight in weights]
    if not matrices or len(weight_list) != len(matrices):
        raise WeightError(f'Got {len(weight_list)} weights for {len(matrices)} matrices')
    if any(weight < 0 or not math.isfinite(weight) for weight in weight_list):
        raise WeightError(f'Weights must be finite and non-negative: {weight_list}')
    if abs(math.fsum(weight_list) - 1.0) > 1e-12:
        raise WeightError(f'Weights must sum to one, got {math.fsum(weight_list)!r}')
    for matrix in matrices[1:]:
        _check_pair(matrices[0], matrix)

    isometry = pullback.isometry
    combined = np.zeros_like(matrices[0].entries)
    for weight, matrix in zip(weight_list, matrices):
        if weight > 0:
            combined = combined + weight * spectral_array(matrix, isometry)
    assert isometry.inverse is not None
    return validate_spd(spectral_array(validate_spd(combined), isometry.inverse))
