"""Symmetric-function identities and MC verification of unitary integrals."""

import itertools
import math

import numpy as np
import pytest

from qrelent.ensembles import RngStream
from qrelent.errors import DomainError, SingularityError, ValidationError
from qrelent.zonal import (
    WeingartenCheck,
    chi_dim,
    conjugate,
    cross_term_exact,
    elementary_symmetric,
    factorized_cross_term_check,
    mc_unitary_integral,
    mc_weingarten_moment,
    partitions_of,
    schur,
    schur_bialternant,
    unitary_integral_exact,
    zonal_C,
)


def brute_force_partitions(l, max_parts):
    """Independent enumeration: filter all bounded tuples."""
    if l == 0:
        return {()}
    found = set()
    for comb in itertools.product(range(l + 1), repeat=max_parts):
        if sum(comb) != l:
            continue
        stripped = tuple(p for p in comb if p > 0)
        if all(a >= b for a, b in zip(stripped, stripped[1:])):
            found.add(stripped)
    return found


def random_hermitian(m, rng, scale=1.0):
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return scale * (a + np.conj(a.T)) / 2.0


class TestPartitions:
    def test_weight_two(self):
        assert partitions_of(2, 3) == [(2,), (1, 1)]

    def test_weight_three_capped_parts(self):
        assert partitions_of(3, 2) == [(3,), (2, 1)]

    def test_weight_four_count(self):
        assert len(partitions_of(4, 4)) == 5

    def test_zero_weight(self):
        assert partitions_of(0, 3) == [()]

    def test_matches_brute_force(self):
        for l in range(0, 7):
            for max_parts in range(1, 7):
                if l > 6:
                    continue
                got = partitions_of(l, max_parts)
                assert len(got) == len(set(got))
                assert set(got) == brute_force_partitions(l, max_parts)

    def test_lexicographically_descending(self):
        for l in range(0, 8):
            got = partitions_of(l, l + 1)
            assert got == sorted(got, reverse=True)

    def test_domain_limits(self):
        with pytest.raises(DomainError):
            partitions_of(9, 3)
        with pytest.raises(DomainError):
            partitions_of(-1, 3)
        with pytest.raises(DomainError):
            partitions_of(2, 0)


class TestConjugate:
    def test_known_shape(self):
        assert conjugate((4, 2, 1)) == (3, 2, 1, 1)

    def test_empty(self):
        assert conjugate(()) == ()

    def test_trailing_zeros_normalized(self):
        assert conjugate((2, 1, 0)) == (2, 1)

    def test_involution(self):
        for l in range(0, 7):
            for kappa in partitions_of(l, 6):
                assert conjugate(conjugate(kappa)) == kappa

    def test_invalid_partitions_rejected(self):
        with pytest.raises(DomainError):
            conjugate((1, 2))
        with pytest.raises(DomainError):
            conjugate((2, -1))
        with pytest.raises(DomainError):
            conjugate((1.5, 1))


class TestElementarySymmetric:
    def test_first_is_the_sum(self):
        x = [0.3, 1.7, -2.0, 4.0]
        assert elementary_symmetric(1, x) == pytest.approx(sum(x), abs=1e-14)

    def test_second_on_123(self):
        assert elementary_symmetric(2, [1.0, 2.0, 3.0]) == pytest.approx(11.0)

    def test_out_of_range_conventions(self):
        assert elementary_symmetric(0, [5.0, 6.0]) == 1.0
        assert elementary_symmetric(4, [1.0, 2.0, 3.0]) == 0.0
        assert elementary_symmetric(-1, [1.0]) == 0.0

    def test_negative_values(self):
        assert elementary_symmetric(2, [-1.0, 1.0]) == pytest.approx(-1.0)

    def test_top_coefficient_is_product(self):
        x = [0.5, -1.5, 2.5, 3.0]
        assert elementary_symmetric(4, x) == pytest.approx(np.prod(x))


class TestSchur:
    def test_single_box_is_trace(self):
        x = [0.2, 1.1, -0.4]
        assert schur((1,), x) == pytest.approx(sum(x), abs=1e-14)

    def test_column_two_boxes(self):
        assert schur((1, 1), [3.0, 5.0]) == pytest.approx(15.0)

    def test_row_two_boxes(self):
        x1, x2 = 1.25, -0.5
        expected = x1 * x1 + x1 * x2 + x2 * x2
        assert schur((2,), [x1, x2]) == pytest.approx(expected)

    def test_empty_partition(self):
        assert schur((), [1.0, 2.0]) == 1.0

    def test_more_parts_than_variables_vanishes(self):
        assert schur((1, 1, 1), [0.7, 0.3]) == 0.0

    def test_repeated_eigenvalues_count_tableaux(self):
        # s_kappa(1,...,1) counts semistandard tableaux; (2,1) with 3
        # symbols gives the 8-dimensional adjoint weight count.
        assert schur((2, 1), [1.0, 1.0, 1.0]) == pytest.approx(8.0)

    def test_agrees_with_bialternant(self):
        gen = np.random.default_rng(2024)
        for m in range(1, 6):
            for l in range(1, 5):
                x = gen.uniform(0.2, 3.0, size=m)
                x += np.arange(m) * 0.05  # keep eigenvalues distinct
                for kappa in partitions_of(l, m):
                    a = schur(kappa, x)
                    b = schur_bialternant(kappa, x)
                    assert a == pytest.approx(b, rel=1e-9, abs=1e-12), (kappa, x)

    def test_bialternant_rejects_coinciding_points(self):
        with pytest.raises(SingularityError):
            schur_bialternant((2,), [1.0, 1.0])


class TestChiDim:
    def test_single_box(self):
        for m in (1, 2, 5):
            assert chi_dim((1,), m) == 1

    def test_weight_two(self):
        assert chi_dim((2,), 3) == 1
        assert chi_dim((1, 1), 3) == 1

    def test_hook_of_three(self):
        assert chi_dim((2, 1), 2) == 2
        assert chi_dim((2, 1), 5) == 2  # padding length must not matter

    def test_weight_four_values(self):
        assert chi_dim((4,), 4) == 1
        assert chi_dim((3, 1), 4) == 3
        assert chi_dim((2, 2), 4) == 2
        assert chi_dim((2, 1, 1), 4) == 3
        assert chi_dim((1, 1, 1, 1), 4) == 1

    def test_squares_sum_to_factorial(self):
        for l in range(1, 6):
            total = sum(chi_dim(kappa, l) ** 2 for kappa in partitions_of(l, l))
            assert total == math.factorial(l)

    def test_domain(self):
        with pytest.raises(DomainError):
            chi_dim((), 3)
        with pytest.raises(DomainError):
            chi_dim((2, 1), 1)


class TestZonalC:
    def test_single_box_on_identity(self):
        for m in (1, 2, 3, 7):
            assert zonal_C((1,), np.ones(m)) == pytest.approx(float(m))

    def test_single_box_is_trace(self):
        x = [0.5, 0.25, 0.25]
        assert zonal_C((1,), x) == pytest.approx(1.0)

    def test_weight_two_sum(self):
        x = np.array([0.3, 1.2, -0.7])
        total = sum(zonal_C(kappa, x) for kappa in partitions_of(2, len(x)))
        assert total == pytest.approx(float(x.sum() ** 2), rel=1e-12)

    def test_trace_power_decomposition(self):
        gen = np.random.default_rng(99)
        for m in range(1, 6):
            for l in range(1, 5):
                x = gen.normal(size=m)
                total = sum(zonal_C(k, x) for k in partitions_of(l, m))
                expected = float(x.sum() ** l)
                assert total == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_empty_partition_is_one(self):
        assert zonal_C((), [2.0, 3.0]) == 1.0

    def test_long_partition_vanishes(self):
        assert zonal_C((1, 1, 1), [1.0, 2.0]) == 0.0


class TestMcUnitaryIntegral:
    def test_constant_integrand_identity_matrices(self):
        est = mc_unitary_integral(np.eye(3), np.eye(3), (1,), 1000, RngStream(6))
        assert est.mean == pytest.approx(3.0, abs=1e-12)
        assert est.stderr <= 1e-13

    def test_single_box_factorizes_traces(self):
        x = np.diag([0.2, 0.9, 1.4])
        y = np.diag([1.0, -0.3, 0.8])
        est = mc_unitary_integral(x, y, (1,), 4000, RngStream(7))
        expected = np.trace(x).real * np.trace(y).real / 3.0
        assert abs(est.mean - expected) <= 4.0 * est.stderr
        assert est.stderr > 0

    def test_weight_two_partitions(self):
        gen = np.random.default_rng(11)
        x = random_hermitian(3, gen)
        y = random_hermitian(3, gen)
        for kappa in ((2,), (1, 1)):
            est = mc_unitary_integral(x, y, kappa, 6000, RngStream(8))
            expected = unitary_integral_exact(x, y, kappa)
            assert abs(est.mean - expected) <= 4.0 * est.stderr, kappa

    def test_deterministic(self):
        x = np.diag([1.0, 2.0])
        y = np.diag([0.5, 1.5])
        a = mc_unitary_integral(x, y, (2,), 1000, RngStream(3))
        b = mc_unitary_integral(x, y, (2,), 1000, RngStream(3))
        assert a == b

    def test_validation(self):
        with pytest.raises(ValidationError):
            mc_unitary_integral(np.eye(2), np.eye(3), (1,), 1000, RngStream(0))
        with pytest.raises(ValidationError):
            mc_unitary_integral(np.eye(2), np.eye(2), (1,), 999, RngStream(0))
        with pytest.raises(ValidationError):
            mc_unitary_integral(np.eye(2), np.eye(2), (1, 1, 1), 1000, RngStream(0))
        with pytest.raises(ValidationError):
            mc_unitary_integral(
                np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2), (1,), 1000, RngStream(0)
            )
        with pytest.raises(DomainError):
            mc_unitary_integral(np.eye(2), np.eye(2), (), 1000, RngStream(0))


class TestFactorizedCrossTerm:
    def test_uniform_spectra_are_constant(self):
        lam = np.full(3, 1.0 / 3.0)
        est = factorized_cross_term_check(lam, lam, 500, RngStream(12))
        assert est.mean == pytest.approx(-math.log(3.0), abs=1e-12)
        assert est.stderr <= 1e-13

    def test_pure_state_mixes_flatly(self):
        rho = np.array([1.0, 0.0, 0.0])
        sigma = np.array([0.6, 0.3, 0.1])
        est = factorized_cross_term_check(rho, sigma, 4000, RngStream(13))
        expected = cross_term_exact(sigma)
        assert abs(est.mean - expected) <= 4.0 * est.stderr

    def test_generic_spectra(self):
        rho = np.array([0.4, 0.3, 0.2, 0.1])
        sigma = np.array([0.45, 0.25, 0.2, 0.1])
        est = factorized_cross_term_check(rho, sigma, 4000, RngStream(14))
        expected = cross_term_exact(sigma)
        assert abs(est.mean - expected) <= 4.0 * est.stderr

    def test_validation(self):
        good = np.array([0.5, 0.5])
        with pytest.raises(SingularityError):
            factorized_cross_term_check(good, np.array([1.0, 0.0]), 100, RngStream(0))
        with pytest.raises(ValidationError):
            factorized_cross_term_check(np.array([0.7, 0.7]), good, 100, RngStream(0))
        with pytest.raises(ValidationError):
            factorized_cross_term_check(good, np.array([0.2, 0.3, 0.5]), 100, RngStream(0))
        with pytest.raises(ValidationError):
            factorized_cross_term_check(np.array([1.5, -0.5]), good, 100, RngStream(0))

    def test_exact_reference_requires_positive_sigma(self):
        with pytest.raises(SingularityError):
            cross_term_exact([0.5, 0.5, 0.0])


class TestWeingarten:
    def test_second_moment_small_dimensions(self):
        for m, seed in ((2, 31), (3, 32)):
            report = mc_weingarten_moment(m, 20000, RngStream(seed))
            assert isinstance(report, WeingartenCheck)
            assert report.max_z <= 4.0, (m, report.max_z)
            assert report.exact[0, 0, 0, 0] == pytest.approx(1.0 / m)

    def test_diagonal_entries_have_exact_real_products(self):
        report = mc_weingarten_moment(2, 2000, RngStream(33))
        # u_ij * conj(u_ij) carries no imaginary part, even in floats
        for i in range(2):
            for j in range(2):
                assert report.mean[i, j, i, j].imag == 0.0
                assert report.stderr_imag[i, j, i, j] == 0.0

    def test_deterministic(self):
        a = mc_weingarten_moment(2, 1000, RngStream(9))
        b = mc_weingarten_moment(2, 1000, RngStream(9))
        assert np.array_equal(a.mean, b.mean)
        assert a.max_z == b.max_z

    def test_validation(self):
        with pytest.raises(DomainError):
            mc_weingarten_moment(0, 100, RngStream(0))
        with pytest.raises(ValidationError):
            mc_weingarten_moment(2, 1, RngStream(0))
