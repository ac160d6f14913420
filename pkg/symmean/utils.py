"""
Catch-all module containing helpers shared by the numerical modules and the command line.

.. module:: utils
   :synopsis:
"""
from typing import List, Optional, Tuple

import numpy as np

from symmean.spd_core import SpdMatrix, validate_spd

DYADIC_EXACTNESS: float = 1e-15


def dyadic_depth(t: float, max_depth: int) -> Optional[Tuple[int, int]]:
    """
    Finds the shallowest dyadic rational m / 2**k within DYADIC_EXACTNESS of t, with k <= max_depth.

    :param t: Weight in [0, 1]
    :type t: float
    :param max_depth: Largest depth k considered
    :type max_depth: int
    :return: Tuple (m, k), or None if t is not dyadic up to max_depth
    :rtype: NoneType|tuple[int, int]
    """
    for depth in range(max_depth + 1):
        scaled = t * 2.0 ** depth
        numerator = round(scaled)
        if abs(numerator / 2.0 ** depth - t) <= DYADIC_EXACTNESS:
            return int(numerator), depth
    return None


def separation_depth(t1: float, t2: float, max_depth: int = 64) -> int:
    """
    Smallest j such that some dyadic m / 2**j lies in [min(t1, t2), max(t1, t2)].

    :param t1: First weight
    :type t1: float
    :param t2: Second weight
    :type t2: float
    :param max_depth: Depth returned when no dyadic up to this depth separates them
    :type max_depth: int
    :return: Separation depth
    :rtype: int
    """
    low, high = min(t1, t2), max(t1, t2)
    for depth in range(max_depth + 1):
        scale = 2.0 ** depth
        if np.ceil(low * scale) <= np.floor(high * scale):
            return depth
    return max_depth


def format_real(value: float) -> str:
    """
    Formats a real with 17 significant digits, enough for a lossless double round trip.

    :param value: Real to format
    :type value: float
    :return: Text representation
    :rtype: str
    """
    return format(float(value), '.17g')


def random_spd(rng: np.random.Generator, dim: int, condition: float = 10.0) -> SpdMatrix:
    """
    Draws a random SPD matrix Q diag(lambda) Q^T with eigenvalues log-uniform in [1, condition].

    :param rng: Seeded generator
    :type rng: numpy.random.Generator
    :param dim: Matrix dimension
    :type dim: int
    :param condition: Upper bound on the condition number
    :type condition: float
    :return: Random SPD matrix
    :rtype: SpdMatrix
    """
    orthogonal, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eigenvalues = np.exp(rng.uniform(0.0, np.log(condition), size=dim))
    return validate_spd((orthogonal * eigenvalues) @ orthogonal.T)


def random_spd_pair(rng: np.random.Generator, dim: int, condition: float = 10.0) -> Tuple[SpdMatrix, SpdMatrix]:
    """Two independent random SPD matrices."""
    return random_spd(rng, dim, condition), random_spd(rng, dim, condition)


def random_cluster(rng: np.random.Generator, count: int, dim: int, spread: float) -> List[SpdMatrix]:
    """
    Draws matrices C (I + spread S_i) C^T with ||S_i||_2 <= 1, so every pairwise R is at most
    (1 + spread) / (1 - spread).

    :param rng: Seeded generator
    :type rng: numpy.random.Generator
    :param count: Number of matrices
    :type count: int
    :param dim: Matrix dimension
    :type dim: int
    :param spread: Perturbation size in (0, 1)
    :type spread: float
    :return: Clustered SPD matrices
    :rtype: list[SpdMatrix]
    """
    if not 0.0 < spread < 1.0:
        raise ValueError('spread must lie in (0, 1)')
    center = np.linalg.cholesky(random_spd(rng, dim).entries)
    cluster: List[SpdMatrix] = []
    for _ in range(count):
        perturbation = rng.standard_normal((dim, dim))
        perturbation = (perturbation + perturbation.T) / 2.0
        perturbation /= max(np.linalg.norm(perturbation, 2), 1e-300)
        cluster.append(validate_spd(center @ (np.eye(dim) + spread * perturbation) @ center.T))
    return cluster


def random_invertible(rng: np.random.Generator, dim: int) -> np.ndarray:
    """
    Draws a well-conditioned invertible matrix for congruence tests.

    :param rng: Seeded generator
    :type rng: numpy.random.Generator
    :param dim: Matrix dimension
    :type dim: int
    :return: Invertible matrix
    :rtype: numpy.ndarray
    """
    left, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    right, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return (left * rng.uniform(0.5, 2.0, size=dim)) @ right
