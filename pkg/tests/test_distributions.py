import math

import numpy as np
import pytest

from recoflow.distributions import (
    check_distribution,
    entropy_sum,
    exponential_variates,
    free_energy,
    grad_free_energy,
    marginal,
    one_site_marginals,
    random_distribution,
    recombinator_product,
    recombinator_sum,
    seeded_rng,
)
from recoflow.errors import BoundaryError, BoundsError, DimensionError, ResourceError, ValidityError
from recoflow.partitions import coarsest, enumerate_partitions, finest, is_finer, parse_partition
from recoflow.typespace import TypeSpace

SP3 = TypeSpace.binary(3)


def measures(size, count, seed=0):
    return [random_distribution(size, seed, k) for k in range(count)]


class TestMarginal:
    def test_full_support_is_identity(self):
        nu = random_distribution(8, 1)
        assert np.array_equal(marginal(SP3, nu, [1, 2, 3]), nu)

    def test_uniform_stays_uniform(self):
        sp = TypeSpace((2, 3, 2))
        m = marginal(sp, np.full(12, 1 / 12), [2, 3])
        assert np.allclose(m, 1 / 6)

    def test_point_mass(self):
        sp = TypeSpace((2, 3, 2))
        nu = np.zeros(12)
        nu[sp.encode((1, 2, 0))] = 1
        m = marginal(sp, nu, [1, 2])
        assert m[1 * 3 + 2] == 1 and m.sum() == 1

    def test_matches_explicit_sum(self):
        sp = TypeSpace((2, 3, 2))
        nu = random_distribution(12, 4)
        m = marginal(sp, nu, [1, 3])
        for a in range(2):
            for c in range(2):
                expected = sum(nu[sp.encode((a, b, c))] for b in range(3))
                assert m[a * 2 + c] == pytest.approx(expected, abs=1e-15)

    def test_bad_sites(self):
        with pytest.raises(BoundsError):
            marginal(SP3, np.full(8, 1 / 8), [0])


class TestRecombinator:
    def test_single_block_is_identity(self):
        nu = random_distribution(8, 2)
        assert np.allclose(recombinator_product(SP3, nu, coarsest(3)), nu, atol=1e-16)
        assert np.allclose(recombinator_sum(SP3, nu, coarsest(3)), nu, atol=1e-16)

    def test_two_locus_by_hand(self):
        sp = TypeSpace.binary(2)
        out = recombinator_product(sp, [0.5, 0, 0, 0.5], finest(2))
        assert np.allclose(out, 0.25)

    def test_fixes_product_measures(self):
        a, b = np.array([0.3, 0.7]), np.array([0.1, 0.5, 0.4])
        nu = np.kron(a, b)
        sp = TypeSpace((2, 3))
        assert np.allclose(recombinator_product(sp, nu, finest(2)), nu, atol=1e-16)

    def test_point_mass_fixed_by_every_partition(self):
        nu = np.zeros(8)
        nu[5] = 1
        for p in enumerate_partitions(3):
            assert np.array_equal(recombinator_sum(SP3, nu, p), nu)
            assert np.array_equal(recombinator_product(SP3, nu, p), nu)

    @pytest.mark.parametrize("sizes", [(2,), (2, 2), (2, 2, 2), (2, 3, 2)])
    def test_product_matches_tuple_sum(self, sizes):
        sp = TypeSpace(sizes)
        for nu in measures(sp.size, 20, seed=len(sizes)):
            for p in enumerate_partitions(sp.n):
                a = recombinator_product(sp, nu, p)
                b = recombinator_sum(sp, nu, p)
                assert np.max(np.abs(a - b)) <= 1e-13

    def test_idempotent_marginals_and_refinement(self):
        parts = enumerate_partitions(3)
        for nu in measures(8, 10, seed=3):
            for a in parts:
                ra = recombinator_product(SP3, nu, a)
                check_distribution(ra)
                assert np.max(np.abs(recombinator_product(SP3, ra, a) - ra)) <= 1e-13
                for m0, m1 in zip(one_site_marginals(SP3, nu), one_site_marginals(SP3, ra)):
                    assert np.max(np.abs(m0 - m1)) <= 1e-15
                for b in parts:
                    if is_finer(a, b):
                        rab = recombinator_product(SP3, recombinator_product(SP3, nu, b), a)
                        assert np.max(np.abs(rab - ra)) <= 1e-13

    def test_tuple_sum_work_bound(self):
        sp = TypeSpace((64, 64, 64))
        nu = np.full(sp.size, 1 / sp.size)
        with pytest.raises(ResourceError):
            recombinator_sum(sp, nu, finest(3))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            recombinator_product(SP3, np.full(8, 1 / 8), parse_partition("1|2"))


class TestFunctionals:
    def test_uniform_free_energy(self):
        for m in (1, 4, 8, 13):
            c = np.full(m, 1 / m)
            assert free_energy(c) == pytest.approx(math.log(m) + 1, abs=1e-14)
            assert np.allclose(grad_free_energy(c), math.log(m))
            assert entropy_sum(c) == pytest.approx(-math.log(m), abs=1e-14)

    def test_boundary_conventions(self):
        assert entropy_sum([0, 1, 0]) == 0
        assert entropy_sum([0.5, 0.5, 0, 0]) == pytest.approx(-math.log(2))
        with pytest.raises(BoundaryError):
            grad_free_energy([0.5, 0.5, 0])

    def test_free_energy_is_one_minus_entropy_sum(self):
        for c in measures(8, 20):
            assert free_energy(c) == pytest.approx(1 - entropy_sum(c), abs=1e-14)


class TestRandomness:
    def test_deterministic(self):
        assert np.array_equal(random_distribution(8, 42), random_distribution(8, 42))
        assert not np.array_equal(random_distribution(8, 42), random_distribution(8, 43))
        assert not np.array_equal(random_distribution(8, 42, 1), random_distribution(8, 42, 2))

    def test_positive_and_normalised(self):
        for c in measures(50, 20):
            assert c.min() > 0
            assert abs(c.sum() - 1) <= 1e-12

    def test_frozen_stream(self):
        # pins the Philox/SeedSequence stream and the inverse-CDF variate
        e = exponential_variates(seeded_rng(0), 3)
        u = seeded_rng(0).random(3) + 2.0**-54
        assert np.array_equal(e, -np.log(u))
        assert np.all(exponential_variates(seeded_rng(5), 10000) > 0)

    def test_exponential_mean(self):
        e = exponential_variates(seeded_rng(1), 200000, rate=2.0)
        assert abs(e.mean() - 0.5) < 4 * 0.5 / math.sqrt(200000)

    def test_check_distribution(self):
        with pytest.raises(ValidityError):
            check_distribution([0.5, 0.6])
        with pytest.raises(ValidityError):
            check_distribution([1.5, -0.5])
        with pytest.raises(DimensionError):
            check_distribution([[1.0]])
        with pytest.raises(DimensionError):
            check_distribution([1.0], size=2)
        assert check_distribution([1.5, -0.5], strict=False).shape == (2,)
        with pytest.raises(ValidityError):
            check_distribution([np.nan, 1], strict=False)
