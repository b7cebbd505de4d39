#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# Copyright (C) 2026 The sbmcov Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Unittests for the chernoff module."""

import math
import unittest

import numpy as np
from numpy import testing
from scipy import integrate
from scipy import optimize
from scipy import stats

import chernoff
import model


class GaussianChernoffTests(unittest.TestCase):
    """Tests for chernoff.gaussian_chernoff."""

    def test_identical(self):
        """Identical Gaussians are indistinguishable."""
        value, _ = chernoff.gaussian_chernoff([0.0, 1.0], np.eye(2),
                                              [0.0, 1.0], np.eye(2))
        self.assertAlmostEqual(value, 0.0, places=12)

    def test_equal_covariance(self):
        """A shared covariance gives a Mahalanobis eighth at t=1/2."""
        sigma = np.array([[2.0, 0.5], [0.5, 1.0]])
        delta = np.array([1.0, -2.0])
        value, t_star = chernoff.gaussian_chernoff(delta, sigma, [0, 0], sigma)
        self.assertAlmostEqual(value, delta @ np.linalg.solve(sigma, delta) / 8,
                               places=10)
        self.assertAlmostEqual(t_star, 0.5, places=6)

    def test_quadrature(self):
        """The 1-D value matches -log of the integrated density product."""
        f1, f2 = stats.norm(0.0, 1.0), stats.norm(1.0, 2.0)

        def divergence(t):
            integral, _ = integrate.quad(
                lambda x: f1.pdf(x)**t * f2.pdf(x)**(1 - t), -np.inf, np.inf)
            return math.log(integral)

        best = optimize.minimize_scalar(divergence, bounds=(0, 1),
                                        method='bounded',
                                        options={'xatol': 1e-10})
        value, _ = chernoff.gaussian_chernoff([0.0], [[1.0]], [1.0], [[4.0]])
        self.assertAlmostEqual(value, -best.fun, places=6)

    def test_symmetric(self):
        """Swapping the arguments keeps the value and mirrors t."""
        first = chernoff.gaussian_chernoff([0.0], [[1.0]], [1.0], [[4.0]])
        second = chernoff.gaussian_chernoff([1.0], [[4.0]], [0.0], [[1.0]])
        self.assertAlmostEqual(first[0], second[0], places=10)
        self.assertAlmostEqual(first[1], 1 - second[1], places=6)

    def test_singular(self):
        """A singular covariance is rejected."""
        with self.assertRaises(chernoff.SingularCovarianceError):
            chernoff.gaussian_chernoff([0, 0], np.zeros((2, 2)), [1, 1],
                                       np.eye(2))


class LimitingCovarianceTests(unittest.TestCase):
    """Tests for chernoff.limiting_covariance."""

    def test_rank_one(self):
        """The scalar case reduces to the rank-one variance."""
        config = chernoff.LatentConfiguration([[0.3], [0.6]], [0.5, 0.5])
        value = chernoff.limiting_covariance(config, 0)[0, 0]
        self.assertAlmostEqual(value, chernoff.rank_one_variances(0.3, 0.6)[0],
                               places=12)
        self.assertAlmostEqual(value, 0.5975, places=3)

    def test_identical_positions(self):
        """Identical positions give g / Delta."""
        config = chernoff.LatentConfiguration([[0.5], [0.5]], [0.5, 0.5])
        testing.assert_allclose(chernoff.limiting_covariance(config, 1),
                                [[0.75]], rtol=1e-12)

    def test_same_role_blocks(self):
        """Blocks related by a block swap share a covariance spectrum."""
        config = chernoff.canonical_positions_homogeneous(0.3, 0.1, 0.2, 2)
        first, third = chernoff.limiting_covariances(config)[0:3:2]
        self.assertAlmostEqual(np.trace(first), np.trace(third), places=10)
        testing.assert_allclose(np.linalg.eigvalsh(first),
                                np.linalg.eigvalsh(third), atol=1e-10)

    def test_singular(self):
        """Collinear positions make Delta singular."""
        config = chernoff.LatentConfiguration([[0.3, 0.3], [0.6, 0.6]],
                                              [0.5, 0.5])
        with self.assertRaises(chernoff.SingularCovarianceError):
            chernoff.limiting_covariance(config, 0)


class LatentConfigurationTests(unittest.TestCase):
    """Tests for chernoff.LatentConfiguration."""

    def test_weights(self):
        """Weights must be positive and sum to one."""
        with self.assertRaises(chernoff.ChernoffError):
            chernoff.LatentConfiguration([[0.3], [0.6]], [0.5, 0.6])

    def test_signature(self):
        """The signature must cover every column."""
        with self.assertRaises(chernoff.ChernoffError):
            chernoff.LatentConfiguration([[0.3, 0.1]], [1.0], (1, 0))

    def test_indefinite_gram(self):
        """Negative directions subtract from inner products."""
        config = chernoff.LatentConfiguration([[0.6, 0.3], [0.6, 0.0]],
                                              [0.5, 0.5], (1, 1))
        testing.assert_allclose(config.gram(), [[0.27, 0.36], [0.36, 0.36]])


class CanonicalPositionsTests(unittest.TestCase):
    """Tests for the canonical latent positions."""

    def test_rank_one_product(self):
        """Positions reproduce B_Z."""
        config = chernoff.canonical_positions_rank_one(0.3, 0.6, 0.1)
        bz = model.build_bz(model.rank_one_model(0.3, 0.6, 0.1))
        testing.assert_allclose(config.gram(), bz, atol=1e-12)
        testing.assert_allclose(config.nu[0], [math.sqrt(0.19), 0, 0],
                                atol=1e-15)
        self.assertEqual(config.signature, (3, 0))

    def test_rank_one_zero_effect(self):
        """Without a covariate effect only the first column remains."""
        config = chernoff.canonical_positions_rank_one(0.3, 0.6, 0.0)
        testing.assert_allclose(config.nu[:, 0], [0.3, 0.3, 0.6, 0.6],
                                atol=1e-15)
        testing.assert_allclose(config.nu[:, 1:], np.zeros((4, 2)),
                                atol=1e-15)

    def test_homogeneous_product(self):
        """Positions reproduce B_Z for K=2..6."""
        for K in range(2, 7):
            config = chernoff.canonical_positions_homogeneous(0.3, 0.1, 0.2, K)
            bz = model.build_bz(model.homogeneous_model(0.3, 0.1, 0.2, K=K))
            self.assertEqual(config.nu.shape, (2 * K, K + 1))
            testing.assert_allclose(config.gram(), bz, atol=1e-10)

    def test_homogeneous_inner_products(self):
        """nu_1 pairs with nu_2, nu_3, nu_4 to a, b + beta and b."""
        nu = chernoff.canonical_positions_homogeneous(0.3, 0.1, 0.2, 2).nu
        self.assertAlmostEqual(nu[0] @ nu[1], 0.3, places=12)
        self.assertAlmostEqual(nu[0] @ nu[2], 0.3, places=12)
        self.assertAlmostEqual(nu[0] @ nu[3], 0.1, places=12)
        self.assertAlmostEqual(nu[0, 0], math.sqrt(0.5), places=15)
        self.assertAlmostEqual(nu[1, 0], 0.3 / math.sqrt(0.5), places=15)

    def test_negative_effect(self):
        """A negative effect has no real canonical factor."""
        with self.assertRaises(chernoff.ChernoffError):
            chernoff.canonical_positions_homogeneous(0.3, 0.1, -0.05, 2)


class PairwiseChernoffTests(unittest.TestCase):
    """Tests comparing numeric C_kl with the closed forms."""

    def test_rank_one_closed_form(self):
        """C_12 and C_34 agree with the closed forms."""
        for p, q, beta in ((0.3, 0.6, 0.1), (0.3, 0.668, 0.49),
                           (0.2, 0.5, 0.3)):
            values, t_star = chernoff.pairwise_chernoff(
                chernoff.canonical_positions_rank_one(p, q, beta))
            closed = chernoff.rank_one_pair_chernoff(p, q, beta)
            self.assertAlmostEqual(values[0, 1], closed['C12'], places=7)
            self.assertAlmostEqual(values[2, 3], closed['C34'], places=7)
            upper = np.triu_indices(4, 1)
            self.assertTrue(np.all(values[upper] >= 0))
            self.assertTrue(np.all((t_star[upper] > 0) & (t_star[upper] < 1)))
        closed = chernoff.rank_one_pair_chernoff(0.3, 0.6, 0.1)
        self.assertAlmostEqual(closed['C12'], 0.017094, places=6)

    def test_rank_one_symmetry(self):
        """Swapping levels maps C_13 to C_24 and C_14 to C_23."""
        values, _ = chernoff.pairwise_chernoff(
            chernoff.canonical_positions_rank_one(0.3, 0.6, 0.1))
        self.assertAlmostEqual(values[0, 2], values[1, 3], places=7)
        self.assertAlmostEqual(values[0, 3], values[1, 2], places=7)

    def test_homogeneous_closed_form(self):
        """C_12 and C_13 agree with the closed forms for K=2..4."""
        for K in (2, 3, 4):
            for beta in (0.05, 0.2):
                values, _ = chernoff.pairwise_chernoff(
                    chernoff.canonical_positions_homogeneous(0.3, 0.1, beta,
                                                             K),
                    pairs=[(0, 1), (0, 2)])
                closed = chernoff.homogeneous_pair_chernoff(0.3, 0.1, beta, K)
                self.assertAlmostEqual(values[0, 1], closed['C12'], places=7)
                self.assertAlmostEqual(values[0, 2], closed['C13'], places=7)

    def test_two_block_closed_form(self):
        """All three distinct two-block pairs agree with the closed forms."""
        for beta in (0.1, 0.2, 0.4):
            values, _ = chernoff.pairwise_chernoff(
                chernoff.canonical_positions_homogeneous(0.3, 0.1, beta, 2))
            closed = chernoff.two_block_pair_chernoff(0.3, 0.1, beta)
            self.assertAlmostEqual(values[0, 1], closed['C12'], places=7)
            self.assertAlmostEqual(values[0, 2], closed['C13'], places=7)
            self.assertAlmostEqual(values[0, 3], closed['C14'], places=7)
        self.assertAlmostEqual(
            chernoff.two_block_pair_chernoff(0.3, 0.1, 0.1)['C13'], 0.05714,
            places=5)

    def test_general_k_matches_two_block(self):
        """The general formulas reduce to the two-block ones at K=2."""
        general = chernoff.homogeneous_pair_chernoff(0.3, 0.1, 0.1, 2)
        two_block = chernoff.two_block_pair_chernoff(0.3, 0.1, 0.1)
        for name in ('C12', 'C13', 'C14'):
            self.assertAlmostEqual(general[name], two_block[name], places=6)
        self.assertAlmostEqual(two_block['C14'], 0.074939, places=5)

    def test_factorization_invariance(self):
        """Eigen-derived positions give the same C_kl."""
        canonical = chernoff.canonical_positions_rank_one(0.3, 0.6, 0.1)
        bz = model.build_bz(model.rank_one_model(0.3, 0.6, 0.1))
        derived = chernoff.LatentConfiguration.from_block_matrix(
            bz, np.full(4, 0.25))
        self.assertEqual(derived.signature, (3, 0))
        first, _ = chernoff.pairwise_chernoff(canonical)
        second, _ = chernoff.pairwise_chernoff(derived)
        testing.assert_allclose(first, second, atol=1e-8)

    def test_same_block(self):
        """C_kk is undefined."""
        config = chernoff.LatentConfiguration([[0.3], [0.6]], [0.5, 0.5])
        with self.assertRaises(chernoff.ChernoffError):
            chernoff.c_kl(config, 1, 1)


class RhoTests(unittest.TestCase):
    """Tests for the Chernoff ratio."""

    def test_rank_one_regimes(self):
        """The two rank-one models sit on either side of 1."""
        self.assertAlmostEqual(
            chernoff.rho_rank_one(0.3, 0.668, 0.49).rho_star, 1.1, delta=0.03)
        self.assertAlmostEqual(
            chernoff.rho_rank_one(0.3, 0.564, 0.49).rho_star, 0.91,
            delta=0.03)

    def test_rank_one_rho2(self):
        """Closed-form rho2 matches its numeric supremum."""
        self.assertAlmostEqual(chernoff.rank_one_rho2(0.3, 0.6), 0.0295,
                               places=4)
        report = chernoff.rho_rank_one(0.3, 0.6, 0.1)
        self.assertAlmostEqual(report.closed_form['rho2_numeric'],
                               report.rho2_star, places=9)
        self.assertAlmostEqual(report.rho_star,
                               report.rho1_star / report.rho2_star)

    def test_homogeneous_four_blocks(self):
        """K=4 with delta < 0 gives exactly one half."""
        report = chernoff.rho_homogeneous(0.3, 0.1, 0.1, 4, numeric=False)
        self.assertAlmostEqual(report.delta, -0.04, places=12)
        self.assertAlmostEqual(report.rho_star, 0.5, places=12)
        self.assertEqual(report.argmin_pair, (0, 1))

    def test_homogeneous_two_blocks(self):
        """K=2 in the small-effect regime."""
        report = chernoff.rho_homogeneous(0.3, 0.1, 0.1, 2)
        self.assertAlmostEqual(report.rho_star, 0.003 / 0.014, places=12)
        self.assertAlmostEqual(report.numeric_rho1_star, report.rho1_star,
                               places=7)

    def test_large_effect(self):
        """Past a - b the ratio depends on beta only through phi_beta."""
        a, b, beta = 0.3, 0.1, 0.4
        phi = a * (1 - a) + b * (1 - b)
        self.assertAlmostEqual(
            chernoff.rho_homogeneous(a, b, beta, 2).rho_star,
            phi / (phi + beta * (1 - a - b - beta)), places=12)

    def test_negative_effect(self):
        """Negative effects get the closed form without numeric values."""
        a, b, beta = 0.135, 0.1, -0.05
        report = chernoff.rho_homogeneous(a, b, beta, 2)
        self.assertTrue(np.isnan(report.numeric_rho1_star))
        self.assertEqual(report.argmin_pair, (0, 2))
        self.assertGreater(report.rho_star, 1)
        self.assertAlmostEqual(report.rho_star,
                               chernoff.two_block_rho(a, b, beta), places=12)

    def test_two_block_agreement(self):
        """The K-block ratio at K=2 matches the two-block ratio."""
        rng = np.random.default_rng(12)
        checked = 0
        while checked < 400:
            b = rng.uniform(0.02, 0.45)
            a = rng.uniform(b + 0.01, 0.95)
            beta = rng.uniform(-b, 1 - a)
            if abs(abs(beta) - (a - b)) < 1e-9:
                continue
            report = chernoff.rho_homogeneous(a, b, beta, 2, numeric=False)
            self.assertAlmostEqual(report.rho_star,
                                   chernoff.two_block_rho(a, b, beta),
                                   delta=1e-12 * max(1.0, report.rho_star))
            self.assertEqual(np.sign(report.delta),
                             np.sign(abs(beta) - (a - b)))
            checked += 1

    def test_invalid(self):
        """a must exceed b."""
        with self.assertRaises(chernoff.ChernoffError):
            chernoff.rho_homogeneous(0.1, 0.1, 0.1, 2)


class ChernoffGridTests(unittest.TestCase):
    """Tests for chernoff.chernoff_grid."""

    def test_homogeneous_regime(self):
        """rho_star exceeds 1 exactly where phi_beta is negative."""
        b = 0.1
        grid = chernoff.chernoff_grid('homogeneous', {'b': b}, (0.1, 0.5),
                                      (0.1, 0.5), 21)
        self.assertEqual((grid.axis1_name, grid.axis2_name), ('a', 'beta'))
        self.assertTrue(np.all(np.isnan(grid.values[0])))
        valid = 0
        for i, a in enumerate(grid.axis1):
            for j, beta in enumerate(grid.axis2):
                value = grid.values[i, j]
                if np.isnan(value):
                    continue
                phi_beta = beta * (1 - a - b - beta)
                if abs(phi_beta) < 1e-12:
                    continue
                self.assertEqual(value > 1, phi_beta < 0, (a, beta, value))
                valid += 1
        self.assertGreater(valid, 0)

    def test_rank_one_corner(self):
        """The far corner of the rank-one grid is about 1.1."""
        grid = chernoff.chernoff_grid('rank_one', {'p': 0.3}, (0.6, 0.668),
                                      (0.4, 0.49), 2)
        self.assertAlmostEqual(grid.values[1, 1], 1.1, delta=0.03)

    def test_invalid_cells_are_nan(self):
        """Cells with a + beta above 1 have no model and stay NaN."""
        grid = chernoff.chernoff_grid('homogeneous', {'b': 0.1}, (0.3, 0.45),
                                      (0.5, 0.6), 4)
        invalid = 0
        for i, a in enumerate(grid.axis1):
            for j, beta in enumerate(grid.axis2):
                if abs(a + beta - 1) < 1e-9:
                    continue
                self.assertEqual(np.isnan(grid.values[i, j]), a + beta > 1,
                                 (a, beta))
                invalid += a + beta > 1
        self.assertGreater(invalid, 0)

    def test_out_of_range_model(self):
        """rho_homogeneous refuses a model whose B_Z leaves [0, 1]."""
        with self.assertRaisesRegex(chernoff.ChernoffError, 'invalid model'):
            chernoff.rho_homogeneous(0.45, 0.1, 0.6, 2)
        with self.assertRaisesRegex(chernoff.ChernoffError, 'invalid model'):
            chernoff.rho_rank_one(0.9, 0.95, 0.2)

    def test_unknown_family(self):
        """Only the known families are accepted."""
        with self.assertRaises(chernoff.ChernoffError):
            chernoff.chernoff_grid('full_rank', {}, (0, 1), (0, 1), 3)


if __name__ == '__main__':
    unittest.main()
