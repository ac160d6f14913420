import numpy as np
import pytest

import symmean.spd_core as spd
import symmean.utils as utl


def test_dyadic_depth():
    assert utl.dyadic_depth(0.0, 64) == (0, 0)
    assert utl.dyadic_depth(1.0, 64) == (1, 0)
    assert utl.dyadic_depth(0.5, 64) == (1, 1)
    assert utl.dyadic_depth(0.75, 64) == (3, 2)
    assert utl.dyadic_depth(5 / 16, 64) == (5, 4)
    assert utl.dyadic_depth(1 / 3, 10) is None


def test_dyadic_depth_of_non_dyadic_float():
    numerator, depth = utl.dyadic_depth(1 / 3, 64)
    assert depth > 10
    assert abs(numerator / 2 ** depth - 1 / 3) <= utl.DYADIC_EXACTNESS


def test_separation_depth():
    assert utl.separation_depth(0.3, 0.6) == 1
    assert utl.separation_depth(0.1, 0.2) == 3
    assert utl.separation_depth(0.2, 0.1) == 3
    assert utl.separation_depth(0.0, 0.4) == 0
    assert utl.separation_depth(0.3, 0.3, max_depth=8) == 8


def test_format_real():
    assert utl.format_real(2.0) == '2'
    assert utl.format_real(0.1) == '0.10000000000000001'
    assert float(utl.format_real(1 / 3)) == 1 / 3


def test_random_spd():
    rng = np.random.default_rng(0)
    for _ in range(10):
        matrix = utl.random_spd(rng, 4, condition=10.0)
        eigenvalues = np.linalg.eigvalsh(matrix.entries)
        assert eigenvalues[0] >= 1.0 - 1e-12
        assert eigenvalues[-1] <= 10.0 + 1e-12


def test_random_spd_is_seeded():
    first = utl.random_spd(np.random.default_rng(42), 3)
    second = utl.random_spd(np.random.default_rng(42), 3)
    np.testing.assert_array_equal(first.entries, second.entries)


def test_random_cluster_diameter():
    rng = np.random.default_rng(1)
    cluster = utl.random_cluster(rng, 4, 3, 0.1)
    bound = 1.1 / 0.9
    for i, first in enumerate(cluster):
        for second in cluster[i + 1:]:
            assert spd.r_metric(first, second).value <= bound * (1 + 1e-12)
    with pytest.raises(ValueError):
        utl.random_cluster(rng, 3, 3, 1.5)


def test_random_invertible():
    rng = np.random.default_rng(2)
    transform = utl.random_invertible(rng, 3)
    singular_values = np.linalg.svd(transform, compute_uv=False)
    assert singular_values.min() >= 0.5 - 1e-12
    assert singular_values.max() <= 2.0 + 1e-12
