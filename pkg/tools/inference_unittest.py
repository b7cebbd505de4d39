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
"""Unittests for the inference module."""

import itertools
import os
import unittest

import numpy as np
from numpy import testing

import cluster
import inference
import model


def _pure_labels(K, c):
    """One vertex per expanded block: xi = 1..Kc and its level."""
    xi = np.arange(1, K * c + 1)
    return xi, (xi - 1) % c + 1


def _exact_graph(m, per_block):
    """Graph whose adjacency is the expected matrix P itself."""
    bz = model.build_bz(m)
    xi = np.repeat(np.arange(1, m.expanded_blocks + 1), per_block)
    graph = model.Graph.from_adjacency(bz[np.ix_(xi - 1, xi - 1)])
    tau = (xi - 1) // m.c + 1
    Z = (xi - 1) % m.c + 1
    return graph, xi, tau, Z


class InducedClusterCountTests(unittest.TestCase):
    """Tests for inference.induced_cluster_count."""

    def test_divisible(self):
        """K_hat divisible by c needs no flag."""
        self.assertEqual(inference.induced_cluster_count(4, 2), (2, ()))

    def test_rounding(self):
        """Other counts round and carry a flag."""
        count, flags = inference.induced_cluster_count(7, 2)
        self.assertEqual(count, 4)
        self.assertEqual(flags, (inference.FLAG_K_NOT_DIVISIBLE,))

    def test_too_few(self):
        """Fewer clusters than levels is an error."""
        with self.assertRaises(inference.InferenceError):
            inference.induced_cluster_count(1, 2)


class BlockDiagonalTests(unittest.TestCase):
    """Tests for inference.block_diagonal_clusters."""

    def test_rank_one(self):
        """The diagonal p^2+beta, q^2+beta separates the two blocks."""
        bz = model.build_bz(model.rank_one_model(0.3, 0.6, 0.1))
        xi = np.array([1, 1, 2, 3, 4, 4])
        phi, tau = inference.block_diagonal_clusters(bz, xi, 2, seed=0)
        self.assertEqual(cluster.ari(phi, [1, 1, 2, 2]), 1.0)
        testing.assert_array_equal(tau, phi[xi - 1])

    def test_too_many_clusters(self):
        """Cannot split K_hat entries into more clusters."""
        with self.assertRaises(inference.InferenceError):
            inference.block_diagonal_clusters(np.eye(2), [1, 2], 3)


class EstimateBetaTests(unittest.TestCase):
    """Tests for the SA and WA estimators."""

    def _homogeneous(self, beta, c=2, K=2):
        bz = model.build_bz(model.homogeneous_model(0.3, 0.1, beta, K=K, c=c))
        xi, Z = _pure_labels(K, c)
        phi = np.repeat(np.arange(1, K + 1), c)
        return bz, xi, phi, Z

    def test_sa_exact(self):
        """SA recovers beta from the exact matrix."""
        self.assertAlmostEqual(
            inference.estimate_beta_sa(*self._homogeneous(0.2)), 0.2,
            places=12)

    def test_sa_zero_effect(self):
        """beta=0 estimates to 0."""
        self.assertAlmostEqual(
            inference.estimate_beta_sa(*self._homogeneous(0.0)), 0.0,
            places=12)

    def test_sa_negative(self):
        """Negative effects keep their sign."""
        self.assertAlmostEqual(
            inference.estimate_beta_sa(*self._homogeneous(-0.05)), -0.05,
            places=12)

    def test_wa_exact(self):
        """Weighted normalization recovers beta on pure clusters."""
        for c, K in ((2, 2), (3, 2), (2, 3)):
            self.assertAlmostEqual(
                inference.estimate_beta_wa(*self._homogeneous(0.2, c, K)),
                0.2, places=12)

    def test_wa_pairs_brute_force(self):
        """Pair normalization matches the triple sum written out."""
        bz, xi, phi, Z = self._homogeneous(0.2)
        K_hat = bz.shape[0]
        F = np.eye(2)[Z - 1]
        pairs = [(l, m) for l, m in itertools.product(range(K_hat), repeat=2)
                 if phi[l] == phi[m]]
        total = sum(F[k] @ (F[l] * (1 - F[m])) * (bz[k, l] - bz[k, m])
                    for k in range(K_hat) for l, m in pairs)
        expected = total / (K_hat * len(pairs))
        value = inference.estimate_beta_wa(bz, xi, phi, Z,
                                           normalization='pairs')
        self.assertAlmostEqual(value, expected, places=12)
        self.assertAlmostEqual(value, 0.05, places=12)

    def test_sa_unshared_levels(self):
        """Clusters whose modal level is absent from a group skip it."""
        rng = np.random.default_rng(11)
        bz = rng.uniform(0.1, 0.5, size=(4, 4))
        bz = (bz + bz.T) / 2
        phi = np.array([1, 1, 2, 2])
        xi, Z = np.arange(1, 5), np.array([1, 2, 1, 3])
        expected = np.mean([bz[0, 0] - bz[0, 1], bz[0, 2] - bz[0, 3],
                            bz[1, 1] - bz[1, 0], bz[2, 0] - bz[2, 1],
                            bz[2, 2] - bz[2, 3], bz[3, 3] - bz[3, 2]])
        self.assertAlmostEqual(inference.estimate_beta_sa(bz, xi, phi, Z),
                               expected, places=12)

    def test_wa_mixed_clusters(self):
        """Weighted normalization leaves out pairs of a cluster with itself."""
        bz = model.build_bz(model.homogeneous_model(0.3, 0.1, 0.2))
        xi = np.array([1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 4, 4])
        Z = np.array([1, 1, 2, 2, 2, 2, 1, 1, 1, 1, 2, 2])
        phi = np.array([1, 1, 2, 2])
        counts = np.zeros((4, 2))
        np.add.at(counts, (xi - 1, Z - 1), 1)
        F = counts / counts.sum(axis=1, keepdims=True)

        def weighted(pairs):
            total = weight = 0.0
            for k in range(4):
                for l, m in pairs:
                    w = F[k] @ (F[l] * (1 - F[m]))
                    total += w * (bz[k, l] - bz[k, m])
                    weight += w
            return total / weight

        same = [(l, m) for l, m in itertools.product(range(4), repeat=2)
                if phi[l] == phi[m]]
        value = inference.estimate_beta_wa(bz, xi, phi, Z)
        self.assertAlmostEqual(value,
                               weighted([(l, m) for l, m in same if l != m]),
                               places=12)
        self.assertNotAlmostEqual(value, weighted(same), places=6)

    def test_empty_cluster_ignored(self):
        """A cluster with no vertices drops out of both estimators."""
        bz, xi, phi, Z = self._homogeneous(0.2, c=3)
        xi, Z = xi[:-1], Z[:-1]
        self.assertAlmostEqual(inference.estimate_beta_sa(bz, xi, phi, Z),
                               0.2, places=12)
        self.assertAlmostEqual(inference.estimate_beta_wa(bz, xi, phi, Z),
                               0.2, places=12)

    def test_empty_pair_set(self):
        """A single covariate level gives no usable pairs."""
        bz = np.array([[0.3, 0.1], [0.1, 0.3]])
        with self.assertRaises(inference.EmptyPairSetError):
            inference.estimate_beta_sa(bz, [1, 2], [1, 2], [1, 1])
        with self.assertRaises(inference.EmptyPairSetError):
            inference.estimate_beta_wa(bz, [1, 2], [1, 2], [1, 1])

    def test_bad_shapes(self):
        """phi_hat must have one entry per cluster."""
        bz, xi, _, Z = self._homogeneous(0.2)
        with self.assertRaises(inference.InferenceError):
            inference.estimate_beta_sa(bz, xi, [1, 2], Z)

    def test_unknown_normalization(self):
        """Only weighted and pairs are accepted."""
        with self.assertRaises(inference.InferenceError):
            inference.estimate_beta_wa(*self._homogeneous(0.2),
                                       normalization='mean')


class AdjustAdjacencyTests(unittest.TestCase):
    """Tests for inference.adjust_adjacency."""

    def test_zero_effect(self):
        """beta=0 leaves a simple graph unchanged."""
        labeled = model.sample(model.rank_one_model(0.3, 0.6, 0.1), 40,
                               seed=1)
        testing.assert_array_equal(
            inference.adjust_adjacency(labeled.graph.A, labeled.Z, 0.0),
            labeled.graph.A)

    def test_entries(self):
        """Same-level pairs lose beta and the diagonal is zero."""
        A = np.ones((3, 3))
        A_tilde = inference.adjust_adjacency(A, [1, 1, 2], 0.25)
        testing.assert_allclose(A_tilde, [[0, 0.75, 1], [0.75, 0, 1],
                                          [1, 1, 0]])
        testing.assert_array_equal(A_tilde, A_tilde.T)


class Algo1Tests(unittest.TestCase):
    """Tests for inference.algo1."""

    def test_exact_expectation(self):
        """The expected adjacency matrix is clustered perfectly."""
        graph, xi, tau, _ = _exact_graph(
            model.rank_one_model(0.3, 0.6, 0.1), 10)
        result = inference.algo1(graph, 2, d=3, K=4, seed=0)
        self.assertEqual(cluster.ari(result.xi_hat, xi), 1.0)
        self.assertEqual(cluster.ari(result.tau_hat, tau), 1.0)
        self.assertEqual(result.B_hat_Z.shape, (4, 4))
        testing.assert_array_equal(result.B_hat_Z, result.B_hat_Z.T)

    def test_bic_range(self):
        """BIC over c..4c finds the four expanded blocks."""
        graph, xi, _, _ = _exact_graph(model.rank_one_model(0.3, 0.6, 0.1),
                                       10)
        result = inference.algo1(graph, 2, d=3, seed=0)
        self.assertEqual(result.K_hat, 4)
        self.assertEqual(cluster.ari(result.xi_hat, xi), 1.0)

    def test_relabeled_vertices(self):
        """Permuting the vertices permutes the recovered labels."""
        graph, _, tau, _ = _exact_graph(model.rank_one_model(0.3, 0.6, 0.1),
                                        10)
        order = np.random.default_rng(12).permutation(graph.n)
        permuted = model.Graph.from_adjacency(graph.A[np.ix_(order, order)])
        result = inference.algo1(graph, 2, d=3, K=4, seed=0)
        shuffled = inference.algo1(permuted, 2, d=3, K=4, seed=0)
        self.assertEqual(cluster.ari(shuffled.xi_hat, result.xi_hat[order]),
                         1.0)
        self.assertEqual(cluster.ari(shuffled.tau_hat, tau[order]), 1.0)

    def test_one_level(self):
        """A single covariate level is rejected."""
        graph, _, _, _ = _exact_graph(model.rank_one_model(0.3, 0.6, 0.1), 5)
        with self.assertRaises(inference.InferenceError):
            inference.algo1(graph, 1, d=2, K=2)


class Algo2Tests(unittest.TestCase):
    """Tests for inference.algo2."""

    def setUp(self):
        self.graph, _, self.tau, self.Z = _exact_graph(
            model.rank_one_model(0.3, 0.6, 0.1), 10)

    def test_known_beta(self):
        """With the true beta the induced blocks are recovered."""
        result = inference.algo2(self.graph, self.Z, beta_known=0.1, d=3,
                                 K=4, d2=1, seed=0)
        self.assertIs(result.method, inference.BetaMethod.KNOWN)
        self.assertEqual(cluster.ari(result.tau_tilde, self.tau), 1.0)
        testing.assert_array_equal(np.diag(result.A_tilde), np.zeros(40))

    def test_both_estimators(self):
        """SA and WA agree on the exact matrix; WA is used."""
        result = inference.algo2(self.graph, self.Z, method='both', d=3,
                                 K=4, d2=1, seed=0)
        self.assertAlmostEqual(result.beta_sa, 0.1, places=6)
        self.assertAlmostEqual(result.beta_wa, 0.1, places=6)
        self.assertEqual(result.beta_hat, result.beta_wa)
        self.assertEqual(cluster.ari(result.tau_tilde, self.tau), 1.0)

    def test_reuses_stage1(self):
        """A supplied algo1 result is passed through."""
        stage1 = inference.algo1(self.graph, 2, d=3, K=4, seed=0)
        result = inference.algo2(self.graph, self.Z, method='SA', d2=1,
                                 stage1=stage1)
        self.assertIs(result.stage1, stage1)
        self.assertIsNone(result.beta_wa)

    def test_relabeled_vertices(self):
        """Permuting the vertices permutes the adjusted labels."""
        order = np.random.default_rng(13).permutation(self.graph.n)
        permuted = model.Graph.from_adjacency(
            self.graph.A[np.ix_(order, order)])
        result = inference.algo2(permuted, self.Z[order], method='both',
                                 d=3, K=4, d2=1, seed=0)
        self.assertEqual(cluster.ari(result.tau_tilde, self.tau[order]), 1.0)
        self.assertAlmostEqual(result.beta_wa, 0.1, places=6)

    def test_declared_levels(self):
        """An explicit c beyond the observed levels drives K_hat / c."""
        with self.assertLogs(inference.logger, level='WARNING') as logs:
            result = inference.algo2(self.graph, self.Z, beta_known=0.1, d=3,
                                     K=4, d2=1, seed=0, c=3)
        self.assertIn('only 2 of 3', '\n'.join(logs.output))
        self.assertIn(inference.FLAG_K_NOT_DIVISIBLE, result.flags)
        self.assertIn(inference.FLAG_SINGLE_CLUSTER, result.flags)
        with self.assertRaises(inference.InferenceError):
            inference.algo2(self.graph, self.Z, beta_known=0.1, d=3, K=4,
                            d2=1, c=1)

    def test_covariance_search(self):
        """Every covariance structure is tried for the fixed K."""
        result = inference.algo2(self.graph, self.Z, beta_known=0.1, d=3,
                                 K=4, d2=1, seed=0,
                                 covariance_types=('spherical', 'full'))
        self.assertEqual(cluster.ari(result.tau_tilde, self.tau), 1.0)

    def test_covariate_length(self):
        """Z needs one entry per vertex."""
        with self.assertRaises(inference.InferenceError):
            inference.algo2(self.graph, self.Z[:-1], beta_known=0.1)

    @unittest.skipUnless(os.environ.get('SBMCOV_SLOW'),
                         'slow statistical test')
    def test_sampled(self):
        """A sampled rank-one graph yields a close beta estimate."""
        labeled = model.sample(model.rank_one_model(0.3, 0.668, 0.49), 260,
                               seed=4)
        result = inference.algo2(labeled.graph, labeled.Z, d=3, K=4, d2=3,
                                 seed=0)
        self.assertLess(abs(result.beta_hat - 0.49), 0.15)
        self.assertGreater(cluster.ari(result.tau_tilde, labeled.tau), 0.5)


if __name__ == '__main__':
    unittest.main()
