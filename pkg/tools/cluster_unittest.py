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
"""Unittests for the cluster module."""

import itertools
import unittest

import numpy as np
from numpy import testing

import cluster


def _clouds(centers, size, sigma, seed):
    rng = np.random.default_rng(seed)
    centers = np.atleast_2d(centers)
    X = np.concatenate([center + sigma * rng.normal(size=(size,
                                                          centers.shape[1]))
                        for center in centers])
    return X, np.repeat(np.arange(len(centers)), size)


class FitGmmTests(unittest.TestCase):
    """Tests for cluster.fit_gmm."""

    def test_two_clouds(self):
        """Separated clouds are recovered."""
        X, truth = _clouds([[0.0], [10.0]], 100, 0.1, seed=0)
        fit = cluster.fit_gmm(X, 2, seed=0)
        testing.assert_allclose(np.sort(fit.means[:, 0]), [0.0, 10.0],
                                atol=0.05)
        self.assertEqual(cluster.ari(fit.labels, truth), 1.0)
        self.assertAlmostEqual(fit.weights.sum(), 1.0, places=10)

    def test_single_component(self):
        """K=1 gives the sample mean and ML covariance."""
        X = np.random.default_rng(1).normal(size=(50, 2))
        fit = cluster.fit_gmm(X, 1, seed=0)
        testing.assert_allclose(fit.means[0], X.mean(axis=0), atol=1e-12)
        testing.assert_allclose(fit.covariances[0],
                                np.cov(X, rowvar=False, bias=True),
                                rtol=1e-8)
        testing.assert_array_equal(fit.labels, np.ones(50))

    def test_duplicate_points(self):
        """Repeated points engage the variance floor without NaNs."""
        X = np.repeat([[0.0], [1.0]], 5, axis=0)
        fit = cluster.fit_gmm(X, 2, seed=0)
        self.assertTrue(fit.degenerate)
        self.assertTrue(np.all(np.isfinite(fit.means)))
        self.assertTrue(np.isfinite(fit.loglik))
        floor = cluster.variance_floor(X)
        for covariance in fit.covariances:
            self.assertGreaterEqual(np.linalg.eigvalsh(covariance).min(),
                                    floor * (1 - 1e-9))

    def test_constant_points(self):
        """Identical points still give a finite fit."""
        fit = cluster.fit_gmm(np.ones((6, 2)), 2, seed=0)
        self.assertTrue(np.all(np.isfinite(fit.covariances)))

    def test_too_few_points(self):
        """Reject n < K."""
        with self.assertRaisesRegex(cluster.ClusteringError, 'cannot fit'):
            cluster.fit_gmm(np.zeros((2, 1)), 3, seed=0)

    def test_monotone(self):
        """The log-likelihood never decreases across EM iterations."""
        X, _ = _clouds([[0, 0], [3, 1], [1, 4]], 60, 1.0, seed=2)
        fit = cluster.fit_gmm(X, 3, seed=1)
        trace = np.array(fit.loglik_trace)
        self.assertTrue(np.all(np.diff(trace) >= -1e-9 * np.abs(trace[:-1])))

    def test_deterministic(self):
        """Equal seeds give equal fits."""
        X, _ = _clouds([[0, 0], [3, 1], [1, 4]], 40, 1.0, seed=3)
        first = cluster.fit_gmm(X, 3, seed=9)
        second = cluster.fit_gmm(X, 3, seed=9)
        testing.assert_array_equal(first.labels, second.labels)
        self.assertEqual(first.loglik, second.loglik)

    def test_parameter_count(self):
        """BIC uses K-1 + Kd + Kd(d+1)/2 parameters."""
        self.assertEqual(cluster.n_parameters(4, 3), 3 + 12 + 24)
        self.assertEqual(cluster.n_parameters(4, 3, 'diag'), 3 + 24)
        self.assertEqual(cluster.n_parameters(4, 3, 'tied'), 3 + 12 + 6)
        self.assertEqual(cluster.n_parameters(4, 3, 'spherical'),
                         3 + 12 + 4)

    def test_diagonal(self):
        """Diagonal fits have zero off-diagonal covariance."""
        X, _ = _clouds([[0, 0], [6, 6]], 50, 1.0, seed=4)
        fit = cluster.fit_gmm(X, 2, seed=0, covariance_type='diag')
        self.assertIs(fit.covariance_type, cluster.CovarianceType.DIAG)
        for covariance in fit.covariances:
            self.assertEqual(covariance[0, 1], 0.0)

    def test_tied(self):
        """Tied fits share one covariance matrix."""
        X, _ = _clouds([[0, 0], [6, 6], [0, 6]], 40, 1.0, seed=4)
        fit = cluster.fit_gmm(X, 3, seed=0, covariance_type='tied')
        for covariance in fit.covariances[1:]:
            testing.assert_allclose(covariance, fit.covariances[0])

    def test_spherical(self):
        """Spherical fits are multiples of the identity."""
        X, _ = _clouds([[0, 0], [6, 6]], 50, 1.0, seed=4)
        fit = cluster.fit_gmm(X, 2, seed=0, covariance_type='spherical')
        for covariance in fit.covariances:
            testing.assert_allclose(covariance,
                                    covariance[0, 0] * np.eye(2))


class SelectKBicTests(unittest.TestCase):
    """Tests for cluster.select_k_bic."""

    def test_four_clusters(self):
        """Well-separated clusters give K_hat=4."""
        X, _ = _clouds([[0, 0], [20, 0], [0, 20], [20, 20]], 50, 1.0,
                       seed=5)
        fit = cluster.select_k_bic(X, range(1, 9), seed=0)
        self.assertEqual(fit.K_hat, 4)
        self.assertEqual(len(fit.candidate_bics), 8)

    def test_single_cloud(self):
        """One Gaussian cloud gives K_hat=1."""
        X = np.random.default_rng(6).normal(size=(300, 2))
        self.assertEqual(cluster.select_k_bic(X, range(1, 5), seed=0).K_hat,
                         1)

    def test_single_candidate(self):
        """A one-element range reproduces fit_gmm."""
        X, _ = _clouds([[0, 0], [5, 5]], 30, 1.0, seed=7)
        selected = cluster.select_k_bic(X, [2], seed=3)
        direct = cluster.fit_gmm(X, 2, seed=3)
        testing.assert_array_equal(selected.labels, direct.labels)
        self.assertEqual(selected.bic, direct.bic)

    def test_range_at_n(self):
        """K up to n still returns a fit."""
        X = np.arange(5.0).reshape(-1, 1)
        fit = cluster.select_k_bic(X, range(1, 6), seed=0)
        self.assertIn(fit.K_hat, range(1, 6))

    def test_covariance_family(self):
        """Elongated clouds with crossed axes select full covariances."""
        rng = np.random.default_rng(10)
        stretch = np.array([[3.0, 0.0], [0.0, 0.2]])
        rotations = [np.array([[1, -1], [1, 1]]) / np.sqrt(2),
                     np.array([[1, 1], [-1, 1]]) / np.sqrt(2)]
        X = np.concatenate([
            rng.normal(size=(200, 2)) @ stretch @ rotation.T + center
            for rotation, center in zip(rotations, ([0, 0], [15, 0]))])
        types = cluster.ALL_COVARIANCE_TYPES
        fit = cluster.select_k_bic(X, [1, 2, 3], seed=0,
                                   covariance_types=types)
        self.assertEqual(fit.K_hat, 2)
        self.assertIs(fit.covariance_type, cluster.CovarianceType.FULL)
        self.assertEqual(len(fit.candidate_bics), 12)
        self.assertEqual(min(bic for _, _, bic in fit.candidate_bics),
                         fit.bic)

    def test_covariance_keyword(self):
        """A single covariance_type keyword restricts the search."""
        X, _ = _clouds([[0, 0], [5, 5]], 30, 1.0, seed=7)
        fit = cluster.select_k_bic(X, [1, 2], seed=0,
                                   covariance_type='spherical')
        self.assertEqual([t for _, t, _ in fit.candidate_bics],
                         ['spherical', 'spherical'])

    def test_empty_range(self):
        """Reject an empty range."""
        with self.assertRaises(cluster.ClusteringError):
            cluster.select_k_bic(np.zeros((4, 1)), [], seed=0)


class AriTests(unittest.TestCase):
    """Tests for cluster.ari."""

    def test_identical(self):
        """Identical labelings score 1."""
        self.assertEqual(cluster.ari([1, 1, 2, 2, 3], [1, 1, 2, 2, 3]), 1.0)

    def test_renamed(self):
        """Renaming labels does not change the score."""
        self.assertEqual(cluster.ari([1, 1, 2, 2, 3], [7, 7, 5, 5, 9]), 1.0)

    def test_crossed(self):
        """The crossed 2x2 design matches brute-force pair counting."""
        a, b = [1, 1, 2, 2], [1, 2, 1, 2]
        pairs = list(itertools.combinations(range(4), 2))
        both = sum(a[i] == a[j] and b[i] == b[j] for i, j in pairs)
        in_a = sum(a[i] == a[j] for i, j in pairs)
        in_b = sum(b[i] == b[j] for i, j in pairs)
        expected = in_a * in_b / len(pairs)
        brute = (both - expected) / ((in_a + in_b) / 2 - expected)
        self.assertAlmostEqual(cluster.ari(a, b), brute)
        self.assertAlmostEqual(cluster.ari(a, b), -0.5)

    def test_properties(self):
        """The index is symmetric, bounded and zero against a constant."""
        rng = np.random.default_rng(8)
        a, b = rng.integers(1, 4, 40), rng.integers(1, 3, 40)
        self.assertAlmostEqual(cluster.ari(a, b), cluster.ari(b, a))
        self.assertTrue(-1 <= cluster.ari(a, b) <= 1)
        self.assertEqual(cluster.ari(a, np.ones(40)), 0.0)

    def test_length_mismatch(self):
        """Reject labelings of different lengths."""
        with self.assertRaisesRegex(cluster.ClusteringError, 'equal length'):
            cluster.ari([1, 2, 3], [1, 2])


if __name__ == '__main__':
    unittest.main()
