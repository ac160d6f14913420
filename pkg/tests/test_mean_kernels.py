import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

import symmean.mean_kernels as mk
import symmean.spd_core as spd
from symmean.enums import KernelKind
from symmean.utils import random_spd_pair
from tests.strategies import invertible_matrices, spd_matrices, weights

KUBO_ANDO_KERNELS = [mk.ARITHMETIC, mk.HARMONIC, mk.GEOMETRIC, mk.LOGARITHMIC]
K_FAMILY_KERNELS = [mk.SQUARE_MEAN] + [mk.MeanKernel(KernelKind.K_FAMILY, k=k) for k in (0.5, 1.0, 2.0)]


def scalar(value):
    return spd.validate_spd([[value]])


def test_from_name():
    assert mk.MeanKernel.from_name('geometric').kind == KernelKind.GEOMETRIC
    assert mk.MeanKernel.from_name(' Harmonic ').kind == KernelKind.HARMONIC
    k_kernel = mk.MeanKernel.from_name('kfamily:1.5')
    assert k_kernel.kind == KernelKind.K_FAMILY
    assert k_kernel.k == 1.5
    assert k_kernel.label == 'kfamily:1.5'
    assert mk.MeanKernel.from_name('square').k == 0.0

    with pytest.raises(mk.KernelError):
        mk.MeanKernel.from_name('median')
    with pytest.raises(mk.KernelError):
        mk.MeanKernel.from_name('kfamily:3')
    with pytest.raises(mk.KernelError):
        mk.MeanKernel.from_name('kfamily:abc')


def test_kernel_validation():
    with pytest.raises(mk.KernelError):
        mk.MeanKernel(KernelKind.GENERATOR)
    with pytest.raises(mk.KernelError):
        mk.MeanKernel(KernelKind.GENERATOR, generator=spd.SpectralFunction(lambda x: 2.0 * x, 'double'))
    with pytest.raises(mk.KernelError):
        mk.MeanKernel(KernelKind.K_FAMILY, k=0.0)
    with pytest.raises(mk.KernelError):
        mk.MeanKernel('contraharmonic')


def test_kernel_properties():
    assert mk.GEOMETRIC.is_kubo_ando
    assert mk.LOGARITHMIC.is_kubo_ando
    assert not mk.SQUARE_MEAN.is_kubo_ando
    assert not mk.MeanKernel(KernelKind.K_FAMILY, k=1.0).is_kubo_ando
    assert mk.ARITHMETIC.pullback is mk.ARITHMETIC_PULLBACK
    assert mk.HARMONIC.pullback is mk.HARMONIC_PULLBACK
    assert mk.SQUARE_MEAN.pullback is mk.QUADRATIC_PULLBACK
    assert mk.GEOMETRIC.pullback is None
    assert repr(mk.GEOMETRIC) == 'MeanKernel(geometric)'


@pytest.mark.parametrize('kernel', [mk.ARITHMETIC, mk.HARMONIC, mk.GEOMETRIC, mk.LOGARITHMIC, mk.SQUARE_MEAN])
def test_generator_function_is_normalized(kernel):
    generator = kernel.generator_function()
    assert float(generator(np.array([1.0]))[0]) == pytest.approx(1.0, abs=1e-15)
    # f(x) = M(1, x) agrees with the matrix mean on scalars
    for value in (0.25, 3.0, 9.0):
        expected = mk.mean2(kernel, scalar(1.0), scalar(value)).entries[0, 0]
        assert float(generator(np.array([value]))[0]) == pytest.approx(expected, rel=1e-12)


def test_logarithmic_generator_near_one():
    generator = mk.LOGARITHMIC_GENERATOR
    near = float(generator(np.array([1.0 + 1e-8]))[0])
    assert near == pytest.approx(1.0 + 0.5e-8, rel=1e-15)
    assert float(generator(np.array([1.0]))[0]) == 1.0
    assert float(generator(np.array([np.e ** 2]))[0]) == pytest.approx((np.e ** 2 - 1.0) / 2.0)


def test_mean2_catalog_values():
    identity = spd.SpdMatrix.identity(2)
    triple = spd.validate_spd(3.0 * np.eye(2))
    np.testing.assert_allclose(mk.mean2(mk.ARITHMETIC, identity, triple).entries, 2.0 * np.eye(2))
    np.testing.assert_allclose(mk.mean2(mk.HARMONIC, identity, triple).entries, 1.5 * np.eye(2))
    np.testing.assert_allclose(mk.mean2(mk.GEOMETRIC, identity, triple).entries, np.sqrt(3.0) * np.eye(2))
    np.testing.assert_allclose(mk.mean2(mk.SQUARE_MEAN, identity, triple).entries, np.sqrt(5.0) * np.eye(2))

    e_squared = spd.validate_spd(np.e ** 2 * np.eye(2))
    np.testing.assert_allclose(mk.mean2(mk.LOGARITHMIC, identity, e_squared).entries,
                               (np.e ** 2 - 1.0) / 2.0 * np.eye(2))

    commuting = mk.mean2(mk.GEOMETRIC, spd.validate_spd(np.diag([1.0, 4.0])), spd.validate_spd(np.diag([4.0, 1.0])))
    np.testing.assert_allclose(commuting.entries, 2.0 * np.eye(2), atol=1e-14)


def test_mean2_dimension_mismatch():
    with pytest.raises(spd.DimensionMismatch):
        mk.mean2(mk.GEOMETRIC, spd.SpdMatrix.identity(2), spd.SpdMatrix.identity(3))


def test_geometric_mean_riccati_and_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(10):
        first, second = random_spd_pair(rng, 3)
        forward = mk.mean2(mk.GEOMETRIC, first, second)
        backward = mk.mean2(mk.GEOMETRIC, second, first)
        np.testing.assert_allclose(forward.entries, backward.entries, rtol=1e-9, atol=1e-12)
        riccati = forward.entries @ np.linalg.inv(first.entries) @ forward.entries
        np.testing.assert_allclose(riccati, second.entries, rtol=1e-9, atol=1e-12)


def test_generator_kernel_matches_catalog():
    geometric_generator = mk.MeanKernel(KernelKind.GENERATOR, generator=spd.SQRT)
    assert geometric_generator.label == 'generator:sqrt'
    rng = np.random.default_rng(8)
    first, second = random_spd_pair(rng, 3)
    np.testing.assert_allclose(mk.mean2(geometric_generator, first, second).entries,
                               mk.mean2(mk.GEOMETRIC, first, second).entries, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize('kernel', KUBO_ANDO_KERNELS)
@settings(max_examples=100)
@seed(21)
@given(first=spd_matrices(), second=spd_matrices())
def test_kubo_ando_sandwich(kernel, first, second):
    middle = mk.mean2(kernel, first, second)
    assert spd.loewner_leq(mk.mean2(mk.HARMONIC, first, second), middle)
    assert spd.loewner_leq(middle, mk.mean2(mk.ARITHMETIC, first, second))


def test_k_family_mean():
    identity = spd.SpdMatrix.identity(2)
    triple = spd.validate_spd(3.0 * np.eye(2))
    np.testing.assert_allclose(mk.k_family_mean(1.0, 0.5, identity, triple).entries, np.sqrt(4.5) * np.eye(2))

    rng = np.random.default_rng(2)
    first, second = random_spd_pair(rng, 3)
    np.testing.assert_allclose(mk.k_family_mean(2.0, 0.25, first, second).entries,
                               0.75 * first.entries + 0.25 * second.entries, rtol=1e-10, atol=1e-12)
    assert spd.loewner_leq(mk.k_family_mean(2.0, 0.5, first, second), mk.k_family_mean(0.0, 0.5, first, second))

    with pytest.raises(mk.KernelError):
        mk.k_family_mean(2.5, 0.5, first, second)
    with pytest.raises(ValueError):
        mk.k_family_mean(1.0, 1.5, first, second)


def test_pullback_nmean():
    result = mk.pullback_nmean(mk.HARMONIC_PULLBACK, [1 / 3, 1 / 3, 1 / 3], [scalar(1.0), scalar(2.0), scalar(4.0)])
    assert result.entries[0, 0] == pytest.approx(12.0 / 7.0)

    identity = spd.SpdMatrix.identity(2)
    double = spd.validate_spd(2.0 * np.eye(2))
    quadratic = mk.pullback_nmean(mk.QUADRATIC_PULLBACK, [1 / 3, 2 / 3], [identity, double])
    np.testing.assert_allclose(quadratic.entries, np.sqrt(3.0) * np.eye(2))

    centroid = mk.ARITHMETIC_PULLBACK.centroid([scalar(1.0), scalar(2.0), scalar(3.0)])
    assert centroid.entries[0, 0] == pytest.approx(2.0)


def test_pullback_weighted2_matches_two_point_mean():
    rng = np.random.default_rng(4)
    first, second = random_spd_pair(rng, 3)
    np.testing.assert_allclose(mk.HARMONIC_PULLBACK.weighted2(0.5, first, second).entries,
                               mk.mean2(mk.HARMONIC, first, second).entries, rtol=1e-10)
    np.testing.assert_allclose(mk.QUADRATIC_PULLBACK.weighted2(0.5, first, second).entries,
                               mk.mean2(mk.SQUARE_MEAN, first, second).entries, rtol=1e-10)


def test_pullback_nmean_weight_errors():
    points = [scalar(1.0), scalar(2.0)]
    with pytest.raises(mk.WeightError):
        mk.pullback_nmean(mk.ARITHMETIC_PULLBACK, [0.5, 0.6], points)
    with pytest.raises(mk.WeightError):
        mk.pullback_nmean(mk.ARITHMETIC_PULLBACK, [1.5, -0.5], points)
    with pytest.raises(mk.WeightError):
        mk.pullback_nmean(mk.ARITHMETIC_PULLBACK, [1.0], points)
    with pytest.raises(spd.DimensionMismatch):
        mk.pullback_nmean(mk.ARITHMETIC_PULLBACK, [0.5, 0.5], [scalar(1.0), spd.SpdMatrix.identity(2)])


def test_pullback_needs_inverse():
    with pytest.raises(mk.KernelError):
        mk.PullbackMean(spd.SpectralFunction(np.log1p, 'log1p'))


def relative_frobenius(first, second):
    return np.linalg.norm(first.entries - second.entries, 'fro') / np.linalg.norm(second.entries, 'fro')


@pytest.mark.parametrize('kernel', KUBO_ANDO_KERNELS)
@seed(22)
@given(smaller=spd_matrices(), increment=spd_matrices())
def test_mean_lies_between_ordered_arguments(kernel, smaller, increment):
    larger = spd.validate_spd(smaller.entries + increment.entries)
    for middle in (mk.mean2(kernel, smaller, larger), mk.mean2(kernel, larger, smaller)):
        assert spd.loewner_leq(smaller, middle)
        assert spd.loewner_leq(middle, larger)


@pytest.mark.parametrize('kernel', KUBO_ANDO_KERNELS)
@seed(23)
@given(first=spd_matrices(), second=spd_matrices(), first_increment=spd_matrices(), second_increment=spd_matrices())
def test_mean_is_monotone(kernel, first, second, first_increment, second_increment):
    larger_first = spd.validate_spd(first.entries + first_increment.entries)
    larger_second = spd.validate_spd(second.entries + second_increment.entries)
    assert spd.loewner_leq(mk.mean2(kernel, first, second), mk.mean2(kernel, larger_first, larger_second))
    assert spd.loewner_leq(mk.mean2(kernel, first, second), mk.mean2(kernel, larger_first, second))


@pytest.mark.parametrize('kernel', KUBO_ANDO_KERNELS)
@seed(24)
@given(first=spd_matrices(), second=spd_matrices(), transform=invertible_matrices())
def test_mean_commutes_with_congruence(kernel, first, second, transform):
    moved = mk.mean2(kernel, spd.congruence(first, transform), spd.congruence(second, transform))
    expected = spd.congruence(mk.mean2(kernel, first, second), transform)
    assert relative_frobenius(moved, expected) <= 1e-9


@pytest.mark.parametrize('kernel', KUBO_ANDO_KERNELS + [mk.SQUARE_MEAN])
@seed(25)
@given(first=spd_matrices(), second=spd_matrices(), factor=st.floats(min_value=0.01, max_value=100.0))
def test_mean_is_positively_homogeneous(kernel, first, second, factor):
    scaled = mk.mean2(kernel, first.scaled(factor), second.scaled(factor))
    assert relative_frobenius(scaled, mk.mean2(kernel, first, second).scaled(factor)) <= 1e-10


K_VALUES = st.lists(st.floats(min_value=0.0, max_value=2.0), min_size=2, max_size=2)


@seed(26)
@given(first=spd_matrices(), second=spd_matrices(), bounds=K_VALUES, t=weights)
def test_k_family_decreases_in_k(first, second, bounds, t):
    low_k, high_k = sorted(bounds)
    assert spd.loewner_leq(mk.k_family_mean(high_k, t, first, second), mk.k_family_mean(low_k, t, first, second))


def trace_bound(first, second, k):
    difference = np.linalg.norm(first.entries - second.entries, 'fro')
    return 0.5 * first.frobenius_norm ** 2 + 0.5 * second.frobenius_norm ** 2 - k / 8.0 * difference ** 2


@pytest.mark.parametrize('kernel', KUBO_ANDO_KERNELS)
@seed(27)
@given(first=spd_matrices(), second=spd_matrices(), k=st.floats(min_value=0.0, max_value=2.0))
def test_kubo_ando_trace_inequality(kernel, first, second, k):
    # every Kubo-Ando mean is below the arithmetic mean, the k = 2 member of the k-family
    scale = 0.5 * (first.frobenius_norm ** 2 + second.frobenius_norm ** 2)
    assert mk.mean2(kernel, first, second).frobenius_norm ** 2 <= trace_bound(first, second, k) + 1e-9 * scale


@pytest.mark.parametrize('kernel', K_FAMILY_KERNELS)
@seed(28)
@given(first=spd_matrices(), second=spd_matrices())
def test_k_family_trace_identity(kernel, first, second):
    k = kernel.k
    scale = 0.5 * (first.frobenius_norm ** 2 + second.frobenius_norm ** 2)
    norm_squared = mk.mean2(kernel, first, second).frobenius_norm ** 2
    assert norm_squared == pytest.approx(trace_bound(first, second, k), abs=1e-9 * scale)
