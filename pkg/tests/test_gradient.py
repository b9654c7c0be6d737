import math

import numpy as np
import pytest

from recoflow.distributions import grad_free_energy, random_distribution, recombinator_product
from recoflow.dynamics import RecombinationRates, reco_rhs
from recoflow.errors import BoundaryError, DimensionError, DomainError, SymmetryError
from recoflow.gradient import (
    SERIES_CUTOFF,
    gradient_rhs,
    jacobi_eigenvalues,
    log_mean,
    onsager_matrix,
    psd_check,
    three_locus_classes,
    three_locus_reference,
    two_locus_reference,
)
from recoflow.networks import build_type_network, mass_action_rhs, pair_reactions
from recoflow.partitions import enumerate_partitions, finest
from recoflow.typespace import TypeSpace

SP2, SP3 = TypeSpace.binary(2), TypeSpace.binary(3)


class TestLogMean:
    def test_values(self):
        assert log_mean(math.e, 1.0) == pytest.approx(math.e - 1, rel=1e-15)
        assert log_mean(0.3, 0.3) == 0.3
        assert log_mean(0.5, 0.0) == 0.0
        assert log_mean(0.0, 0.0) == 0.0
        assert isinstance(log_mean(2.0, 1.0), float)

    def test_negative_input(self):
        with pytest.raises(DomainError):
            log_mean(-1.0, 1.0)
        with pytest.raises(DomainError):
            log_mean([1.0, np.nan], 1.0)

    def test_symmetric_and_between_min_and_max(self):
        rng = np.random.default_rng(1)
        x, y = rng.exponential(size=1000), rng.exponential(size=1000)
        lxy = log_mean(x, y)
        assert np.array_equal(lxy, log_mean(y, x))
        assert np.all(np.minimum(x, y) <= lxy) and np.all(lxy <= np.maximum(x, y))
        # the logarithmic mean lies between the geometric and arithmetic means
        assert np.all(np.sqrt(x * y) <= lxy * (1 + 1e-15)) and np.all(lxy <= (x + y) / 2 * (1 + 1e-15))

    def test_matches_definition_when_well_separated(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(0.01, 1, 500)
        y = x * rng.uniform(1.05, 20, 500)
        assert np.allclose(log_mean(x, y), (x - y) / (np.log(x) - np.log(y)), rtol=1e-13)

    def test_near_diagonal_against_long_series(self):
        # x = m(1+r), y = m(1-r): L = m r / atanh r = m (1 - r^2/3 - 4 r^4/45 - ...)
        m = 0.7
        for r in [0.0, 1e-12, 1e-8, 3e-6, 5e-5, 0.99e-4, 1.01e-4, 1e-3]:
            expected = m * (1 - r**2 / 3 - 4 * r**4 / 45 - 44 * r**6 / 945)
            assert log_mean(m * (1 + r), m * (1 - r)) == pytest.approx(expected, rel=4e-16 if r < 1e-3 else 1e-15)

    def test_continuous_across_cutoff(self):
        r = np.array([SERIES_CUTOFF * (1 - 1e-9), SERIES_CUTOFF * (1 + 1e-9)])
        vals = log_mean(1 + r, 1 - r)
        assert abs(vals[0] - vals[1]) < 1e-15

    def test_vanishes_continuously_at_boundary(self):
        assert log_mean(1.0, 1e-300) < 1e-2
        assert log_mean(1e-12, 1e-12) == 1e-12


class TestOnsager:
    def net(self, n, seed):
        sp = TypeSpace.binary(n)
        r = RecombinationRates.random(n, seed)
        net = build_type_network(sp, r)
        pair_reactions(net)
        return sp, r, net

    def test_two_locus_closed_form(self):
        for k in range(20):
            rho = 0.1 + k / 10
            net = build_type_network(SP2, RecombinationRates(2, {"1|2": rho}))
            nu = random_distribution(4, 40, k)
            c = onsager_matrix(net, nu)
            ref = two_locus_reference(nu, rho)
            assert np.array_equal(c, ref)
            assert np.linalg.matrix_rank(c) == 1

    def test_zero_rates(self):
        net = build_type_network(SP3, RecombinationRates(3))
        assert np.array_equal(onsager_matrix(net, random_distribution(8, 0)), np.zeros((8, 8)))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_gradient_form_reproduces_rhs(self, n):
        for k in range(30):
            sp, r, net = self.net(n, k)
            c = random_distribution(sp.size, 50, k)
            g = gradient_rhs(net, c)
            assert np.max(np.abs(g - mass_action_rhs(net, c))) <= 1e-10
            assert np.max(np.abs(g - reco_rhs(sp, c, r))) <= 1e-10

    def test_mixed_alphabets(self):
        sp = TypeSpace((2, 3, 2))
        r = RecombinationRates.random(3, 8)
        net = build_type_network(sp, r)
        for k in range(10):
            c = random_distribution(sp.size, 51, k)
            assert np.max(np.abs(gradient_rhs(net, c) - reco_rhs(sp, c, r))) <= 1e-10

    def test_symmetric_psd_kernel_and_dissipation(self):
        sp, r, net = self.net(3, 3)
        for k in range(20):
            c = random_distribution(8, 52, k)
            m = onsager_matrix(net, c)
            assert np.max(np.abs(m - m.T)) <= 1e-12
            assert psd_check(m, seed=k)
            assert np.max(np.abs(m @ np.ones(8))) <= 1e-14
            g = grad_free_energy(c)
            assert g @ m @ g >= 0

    def test_zero_at_full_product(self):
        sp, r, net = self.net(3, 4)
        nu = recombinator_product(sp, random_distribution(8, 5), finest(3))
        assert np.max(np.abs(gradient_rhs(net, nu))) <= 1e-14
        g = grad_free_energy(nu)
        assert abs(g @ onsager_matrix(net, nu) @ g) <= 1e-12

    def test_boundary(self):
        _, _, net = self.net(2, 0)
        with pytest.raises(BoundaryError):
            onsager_matrix(net, [0.5, 0.5, 0, 0])
        assert onsager_matrix(net, [0.5, 0.5, 0, 0], allow_boundary=True).shape == (4, 4)
        with pytest.raises(DimensionError):
            onsager_matrix(net, np.full(8, 1 / 8))

    def test_pairing_computed_on_demand(self):
        net = build_type_network(SP2, RecombinationRates(2, {"1|2": 1.0}))
        assert net.pairing is None
        onsager_matrix(net, np.full(4, 0.25))
        assert net.pairing is not None


class TestThreeLocusReference:
    rates = (0.7, 1.3, 0.4)

    def test_reproduces_recombination_rhs(self):
        r = RecombinationRates.two_parent_three_locus(*self.rates)
        for k in range(50):
            nu = random_distribution(8, 60, k)
            ref = three_locus_reference(nu, *self.rates)
            assert np.max(np.abs(ref @ grad_free_energy(nu) - reco_rhs(SP3, nu, r))) <= 1e-9
            assert np.max(np.abs(ref - ref.T)) <= 1e-12

    def test_first_class_entry(self):
        nu = random_distribution(8, 61)
        r1, r2, r3 = self.rates
        first = three_locus_classes(nu, *self.rates)[0]
        assert first[0, 0] == pytest.approx((r1 + r2) * log_mean(nu[0] * nu[6], nu[2] * nu[4]), rel=1e-15)
        # the class lives on g0, g2, g4, g6 only
        assert set(np.nonzero(first)[0]) == {0, 2, 4, 6}

    def test_classes_are_rank_one_except_the_last(self):
        nu = random_distribution(8, 62)
        classes = three_locus_classes(nu, *self.rates)
        assert len(classes) == 7
        assert [np.linalg.matrix_rank(c) for c in classes[:6]] == [1] * 6
        assert psd_check(classes[6])

    def test_verbatim_sign_breaks_the_identity(self):
        nu = random_distribution(8, 63)
        r = RecombinationRates.two_parent_three_locus(*self.rates)
        typo = three_locus_reference(nu, *self.rates, verbatim=True)
        assert np.max(np.abs(typo @ grad_free_energy(nu) - reco_rhs(SP3, nu, r))) > 1e-3

    def test_interior_only(self):
        with pytest.raises(BoundaryError):
            three_locus_reference(np.eye(8)[0], *self.rates)
        with pytest.raises(DimensionError):
            three_locus_reference(np.full(4, 0.25), *self.rates)


class TestPsd:
    def test_examples(self):
        assert not psd_check(-np.eye(3))
        assert psd_check(np.zeros((4, 4)))
        nu = random_distribution(4, 0)
        assert psd_check(two_locus_reference(nu, 1.0))

    def test_report(self):
        ok, qf, ev = psd_check(np.diag([1.0, 2.0, -0.5]), report=True)
        assert not ok and ev == pytest.approx(-0.5, abs=1e-14) and qf < 0

    def test_asymmetric(self):
        with pytest.raises(SymmetryError):
            psd_check(np.array([[1.0, 0.1], [0.0, 1.0]]))
        with pytest.raises(DimensionError):
            psd_check(np.ones((2, 3)))

    def test_jacobi_against_numpy(self):
        rng = np.random.default_rng(3)
        for size in (1, 2, 5, 8, 15):
            a = rng.standard_normal((size, size))
            a = a + a.T
            assert np.allclose(jacobi_eigenvalues(a), np.linalg.eigvalsh(a), atol=1e-12)

    def test_catches_small_negative_eigenvalue(self):
        # a quadratic-form probe can miss this; the eigenvalue solve must not
        v = np.ones(8) / np.sqrt(8)
        m = np.eye(8) - (1 + 1e-6) * np.outer(v, v)
        ok, qf, ev = psd_check(m, report=True)
        assert not ok and ev == pytest.approx(-1e-6, abs=1e-12)


def test_every_three_site_support_is_gradient():
    parts = enumerate_partitions(3)
    for mask in range(1, 2 ** len(parts), 3):
        r = RecombinationRates(3, {p: 0.5 + i for i, p in enumerate(parts) if mask >> i & 1})
        net = build_type_network(SP3, r)
        c = random_distribution(8, 70, mask)
        assert np.max(np.abs(gradient_rhs(net, c) - reco_rhs(SP3, c, r))) <= 1e-10
