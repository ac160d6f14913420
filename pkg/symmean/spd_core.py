"""
Module containing the validated SPD matrix type, its spectral functional calculus, metrics and Loewner comparisons.

.. module:: spd_core
   :synopsis:
"""
from functools import cached_property
from typing import Callable, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from symmean.enums import MetricKind

POSITIVITY_FLOOR_SCALE: float = 1e-12
DEFAULT_REL_TOL: float = 1e-9


class MatrixMeanException(Exception):
    """Base exception class for every computational failure raised by symmean."""


class NotSquare(MatrixMeanException):
    """Raised when a raw array is not a non-empty square matrix."""


class NotPositiveDefinite(MatrixMeanException):
    """Raised when a matrix fails the positivity floor."""

    def __init__(self, smallest_eigenvalue: float, floor: float = 0.0) -> None:
        super().__init__(f'Matrix is not positive definite: smallest eigenvalue {smallest_eigenvalue:.6g} '
                         f'does not exceed the positivity floor {floor:.6g}')
        self.smallest_eigenvalue: float = smallest_eigenvalue
        self.floor: float = floor


class NonPositiveResult(MatrixMeanException):
    """Raised when a spectral function produces a non-positive value on a spectrum."""


class SingularCongruence(MatrixMeanException):
    """Raised when a congruence transform is (numerically) singular."""


class DimensionMismatch(MatrixMeanException):
    """Raised when two matrices that must share a dimension do not."""


class SpectralFunction:
    """A scalar map on (0, inf) applied to symmetric matrices through their eigen-decomposition."""

    def __init__(
            self,
            evaluator: Callable[[np.ndarray], np.ndarray],
            label: str,
            inverse: Optional['SpectralFunction'] = None,
    ) -> None:
        self.evaluator: Callable[[np.ndarray], np.ndarray] = evaluator
        self.label: str = label
        self.inverse: Optional['SpectralFunction'] = inverse

    def __call__(self, values: Union[float, np.ndarray]) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(values, dtype=float)), dtype=float)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f'SpectralFunction({self.label})'

    @classmethod
    def power(cls, exponent: float) -> 'SpectralFunction':
        """
        Builds x -> x**exponent together with its inverse x -> x**(1/exponent).

        :param exponent: Non-zero real exponent
        :type exponent: float
        :return: Power function with a tracked inverse
        :rtype: SpectralFunction
        """
        if exponent == 0:
            raise ValueError('Power spectral functions need a non-zero exponent.')
        forward = cls(lambda x: np.power(x, exponent), f'x^{exponent:g}')
        forward.inverse = cls(lambda x: np.power(x, 1.0 / exponent), f'x^{1.0 / exponent:g}', inverse=forward)
        return forward


IDENTITY = SpectralFunction(lambda x: x, 'identity')
IDENTITY.inverse = IDENTITY
INVERSE = SpectralFunction(lambda x: 1.0 / x, 'inverse')
INVERSE.inverse = INVERSE
SQRT = SpectralFunction(np.sqrt, 'sqrt')
SQUARE = SpectralFunction(np.square, 'square', inverse=SQRT)
SQRT.inverse = SQUARE


class SpdMatrix:
    """Real symmetric positive definite matrix, symmetrized and frozen at construction."""

    def __init__(self, entries: np.ndarray, label: Optional[str] = None) -> None:
        # Callers go through validate_spd; entries are assumed symmetric and positive here.
        frozen = np.array(entries, dtype=float, copy=True)
        frozen.setflags(write=False)
        self.entries: np.ndarray = frozen
        self.label: Optional[str] = label

    @property
    def dim(self) -> int:
        """
        Dimension r of the r x r matrix.

        :return: Matrix dimension
        :rtype: int
        """
        return int(self.entries.shape[0])

    @cached_property
    def spectrum(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Eigenvalues (ascending) and orthonormal eigenvectors of the matrix.

        :return: Tuple of eigenvalues and eigenvector matrix
        :rtype: tuple
        """
        eigenvalues, eigenvectors = scipy.linalg.eigh(self.entries)
        return eigenvalues, eigenvectors

    @property
    def frobenius_norm(self) -> float:
        """
        Frobenius norm of the matrix.

        :return: Frobenius norm
        :rtype: float
        """
        return float(np.linalg.norm(self.entries, 'fro'))

    def as_array(self) -> np.ndarray:
        """
        Returns a writable copy of the entries.

        :return: Copy of the matrix entries
        :rtype: numpy.ndarray
        """
        return np.array(self.entries, copy=True)

    def scaled(self, factor: float) -> 'SpdMatrix':
        """
        Multiplies the matrix by a positive scalar.

        :param factor: Positive scale factor
        :type factor: float
        :return: Scaled matrix
        :rtype: SpdMatrix
        """
        if factor <= 0:
            raise ValueError('Scale factor must be positive.')
        return SpdMatrix(self.entries * factor, self.label)

    @classmethod
    def identity(cls, dim: int) -> 'SpdMatrix':
        """
        Identity matrix of the given dimension.

        :param dim: Matrix dimension
        :type dim: int
        :return: Identity matrix
        :rtype: SpdMatrix
        """
        if dim < 1:
            raise NotSquare('Dimension must be at least 1.')
        return cls(np.eye(dim))

    @classmethod
    def from_array(cls, raw: Union[np.ndarray, list], label: Optional[str] = None) -> 'SpdMatrix':
        """
        Shortcut for validate_spd with the default positivity floor.

        :param raw: Square array-like
        :type raw: numpy.ndarray|list
        :param label: Optional label carried into reports
        :type label: str
        :return: Validated matrix
        :rtype: SpdMatrix
        """
        validated = validate_spd(raw)
        validated.label = label
        return validated

    def __str__(self) -> str:
        prefix = f'{self.label}: ' if self.label else ''
        return f'{prefix}SpdMatrix(dim={self.dim})'

    def __repr__(self) -> str:
        return str(self)


class MetricValue:
    """A distance or gauge value together with the kind of metric that produced it."""

    def __init__(self, value: float, kind: str) -> None:
        self.value: float = float(value)
        self.kind: str = kind

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return f'{self.kind}={self.value:.17g}'

    def __repr__(self) -> str:
        return str(self)


def validate_spd(raw: Union[np.ndarray, list], floor_scale: float = POSITIVITY_FLOOR_SCALE) -> SpdMatrix:
    """
    Symmetrizes a raw square array and checks it against the positivity floor.

    The floor is ``floor_scale * largest eigenvalue * dim``.

    :param raw: Dense r x r real array
    :type raw: numpy.ndarray|list
    :param floor_scale: Relative positivity floor
    :type floor_scale: float
    :return: Validated matrix
    :rtype: SpdMatrix
    :raises: NotSquare, NotPositiveDefinite
    """
    array = np.asarray(raw, dtype=float)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
        raise NotSquare(f'Expected a non-empty square matrix, got shape {array.shape}')
    if not np.all(np.isfinite(array)):
        raise NotPositiveDefinite(float('nan'))
    symmetric = (array + array.T) / 2.0
    eigenvalues = scipy.linalg.eigvalsh(symmetric)
    floor = floor_scale * max(float(eigenvalues[-1]), 0.0) * symmetric.shape[0]
    if eigenvalues[0] <= floor:
        raise NotPositiveDefinite(float(eigenvalues[0]), floor)
    return SpdMatrix(symmetric)


def _check_dims(first: SpdMatrix, second: SpdMatrix) -> None:
    if first.dim != second.dim:
        raise DimensionMismatch(f'Dimension mismatch: {first.dim} vs {second.dim}')


def spectral_array(matrix: SpdMatrix, function: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """
    Applies a scalar function through the eigen-decomposition and returns the symmetrized array, unvalidated.

    :param matrix: Matrix to transform
    :type matrix: SpdMatrix
    :param function: Vectorized scalar map, positive on the spectrum
    :type function: callable
    :return: Symmetric array Q diag(g(lambda)) Q^T
    :rtype: numpy.ndarray
    :raises: NonPositiveResult
    """
    eigenvalues, eigenvectors = matrix.spectrum
    mapped = np.asarray(function(eigenvalues), dtype=float)
    if not np.all(np.isfinite(mapped)) or np.any(mapped <= 0):
        raise NonPositiveResult(f'Spectral function produced non-positive values {mapped} on spectrum {eigenvalues}')
    result = (eigenvectors * mapped) @ eigenvectors.T
    return (result + result.T) / 2.0


def apply_spectral(matrix: SpdMatrix, function: SpectralFunction) -> SpdMatrix:
    """
    Applies a scalar function to a matrix through its eigen-decomposition, Q diag(g(lambda)) Q^T.

    :param matrix: Matrix to transform
    :type matrix: SpdMatrix
    :param function: Scalar map, positive on the spectrum
    :type function: SpectralFunction
    :return: Transformed matrix
    :rtype: SpdMatrix
    :raises: NonPositiveResult
    """
    return validate_spd(spectral_array(matrix, function))


def matrix_power(matrix: SpdMatrix, exponent: float) -> SpdMatrix:
    """
    Real power of an SPD matrix.

    :param matrix: Base matrix
    :type matrix: SpdMatrix
    :param exponent: Real exponent
    :type exponent: float
    :return: matrix ** exponent
    :rtype: SpdMatrix
    """
    return validate_spd(spectral_array(matrix, lambda x: np.power(x, exponent)))


def sqrt(matrix: SpdMatrix) -> SpdMatrix:
    """Symmetric square root."""
    return apply_spectral(matrix, SQRT)


def inverse_sqrt(matrix: SpdMatrix) -> SpdMatrix:
    """Inverse of the symmetric square root."""
    return matrix_power(matrix, -0.5)


def inverse(matrix: SpdMatrix) -> SpdMatrix:
    """Matrix inverse computed through the eigen-decomposition."""
    return apply_spectral(matrix, INVERSE)


def congruence(matrix: SpdMatrix, transform: Union[np.ndarray, list]) -> SpdMatrix:
    """
    Computes C A C^T for an invertible C.

    :param matrix: Matrix A
    :type matrix: SpdMatrix
    :param transform: Invertible r x r array C
    :type transform: numpy.ndarray|list
    :return: C A C^T
    :rtype: SpdMatrix
    :raises: SingularCongruence, DimensionMismatch
    """
    transform_array = np.asarray(transform, dtype=float)
    if transform_array.shape != matrix.entries.shape:
        raise DimensionMismatch(f'Congruence of shape {transform_array.shape} on a {matrix.dim}x{matrix.dim} matrix')
    condition = np.linalg.cond(transform_array)
    if not np.isfinite(condition) or condition * np.finfo(float).eps >= 1.0:
        raise SingularCongruence(f'Congruence transform is singular (condition number {condition:.3g})')
    return validate_spd(transform_array @ matrix.entries @ transform_array.T)


def relative_spectrum(first: SpdMatrix, second: SpdMatrix) -> np.ndarray:
    """
    Eigenvalues of A^(-1/2) B A^(-1/2), which is similar to A^(-1) B.

    :param first: Matrix A
    :type first: SpdMatrix
    :param second: Matrix B
    :type second: SpdMatrix
    :return: Ascending eigenvalues
    :rtype: numpy.ndarray
    """
    _check_dims(first, second)
    root = spectral_array(first, lambda x: 1.0 / np.sqrt(x))
    whitened = root @ second.entries @ root
    return scipy.linalg.eigvalsh((whitened + whitened.T) / 2.0)


def r_metric(first: SpdMatrix, second: SpdMatrix) -> MetricValue:
    """
    Multiplicative gauge R(A, B) = max(rho(A^-1 B), rho(B^-1 A)).

    :param first: Matrix A
    :type first: SpdMatrix
    :param second: Matrix B
    :type second: SpdMatrix
    :return: R value, at least 1
    :rtype: MetricValue
    :raises: DimensionMismatch
    """
    eigenvalues = relative_spectrum(first, second)
    value = max(float(eigenvalues[-1]), 1.0 / float(eigenvalues[0]), 1.0)
    return MetricValue(value, MetricKind.R_MULTIPLICATIVE)


def euclid_dist(first: Optional[Union[SpdMatrix, int]], second: SpdMatrix) -> MetricValue:
    """
    Frobenius distance. Passing ``0`` or ``None`` as the first argument measures from the zero matrix.

    :param first: Matrix A, or 0/None for the zero matrix
    :type first: SpdMatrix|int|NoneType
    :param second: Matrix B
    :type second: SpdMatrix
    :return: Frobenius distance
    :rtype: MetricValue
    :raises: DimensionMismatch
    """
    if isinstance(first, SpdMatrix):
        _check_dims(first, second)
        difference = first.entries - second.entries
    elif first is None or first == 0:
        difference = second.entries
    else:
        raise TypeError('euclid_dist expects an SpdMatrix or 0 as its first argument.')
    return MetricValue(float(np.linalg.norm(difference, 'fro')), MetricKind.EUCLID)


def pullback_dist(first: SpdMatrix, second: SpdMatrix, function: SpectralFunction) -> MetricValue:
    """
    Distance d_f(A, B) = ||f(A) - f(B)||_F pulled back through f.

    :param first: Matrix A
    :type first: SpdMatrix
    :param second: Matrix B
    :type second: SpdMatrix
    :param function: Isometry f
    :type function: SpectralFunction
    :return: Pullback distance
    :rtype: MetricValue
    """
    _check_dims(first, second)
    difference = spectral_array(first, function) - spectral_array(second, function)
    return MetricValue(float(np.linalg.norm(difference, 'fro')), MetricKind.PULLBACK)


def loewner_margin(first: SpdMatrix, second: SpdMatrix) -> float:
    """
    Smallest eigenvalue of B - A, normalized by max(||A||_F, ||B||_F).

    Non-negative exactly when A <= B in the Loewner order.

    :param first: Matrix A
    :type first: SpdMatrix
    :param second: Matrix B
    :type second: SpdMatrix
    :return: Normalized margin
    :rtype: float
    """
    _check_dims(first, second)
    difference = second.entries - first.entries
    smallest = float(scipy.linalg.eigvalsh((difference + difference.T) / 2.0)[0])
    return smallest / max(first.frobenius_norm, second.frobenius_norm)


def loewner_leq(first: SpdMatrix, second: SpdMatrix, rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """
    Decides A <= B up to a relative tolerance.

    :param first: Matrix A
    :type first: SpdMatrix
    :param second: Matrix B
    :type second: SpdMatrix
    :param rel_tol: Relative tolerance on the smallest eigenvalue of B - A
    :type rel_tol: float
    :return: True if B - A is positive semidefinite within tolerance
    :rtype: bool
    """
    return loewner_margin(first, second) >= -rel_tol
