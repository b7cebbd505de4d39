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
"""Unittests for the model module."""

import unittest

import numpy as np
from numpy import testing

import model


class BuildBzTests(unittest.TestCase):
    """Tests for model.build_bz."""

    def test_rank_one_entries(self):
        """The first row pairs p^2, pq with and without beta."""
        bz = model.build_bz(model.rank_one_model(0.3, 0.6, 0.1))
        testing.assert_allclose(bz[0], [0.19, 0.09, 0.28, 0.18], atol=1e-12)
        testing.assert_array_equal(bz, bz.T)

    def test_homogeneous_entries(self):
        """The homogeneous first row is a+beta, a, b+beta, b."""
        bz = model.build_bz(model.homogeneous_model(0.3, 0.1, 0.2, K=2))
        testing.assert_allclose(bz[0], [0.5, 0.3, 0.3, 0.1], atol=1e-12)

    def test_zero_effect_replicates_b(self):
        """With beta=0 every level pair sees the same probability."""
        bz = model.build_bz(model.rank_one_model(0.3, 0.6, 0.0, c=3))
        B = np.array([[0.09, 0.18], [0.18, 0.36]])
        testing.assert_allclose(bz, np.kron(B, np.ones((3, 3))), atol=1e-15)

    def test_out_of_range(self):
        """Reject models whose B_Z leaves [0, 1]."""
        with self.assertRaisesRegex(model.ModelError, 'B_Z'):
            model.rank_one_model(0.9, 0.95, 0.2)
        with self.assertRaisesRegex(model.ModelError, 'B_Z'):
            model.homogeneous_model(0.3, 0.2, -0.25)

    def test_negative_beta_allowed(self):
        """Negative beta is fine while B_Z stays valid."""
        bz = model.build_bz(model.homogeneous_model(0.135, 0.1, -0.09, c=5))
        self.assertGreaterEqual(bz.min(), 0.0)
        self.assertEqual(bz.shape, (10, 10))


class CovariateBlockModelTests(unittest.TestCase):
    """Tests for model.CovariateBlockModel."""

    def test_piz_must_marginalize(self):
        """piZ has to sum to pi within each block."""
        with self.assertRaisesRegex(model.ModelError, 'marginalize'):
            model.CovariateBlockModel(B=[[0.2, 0.1], [0.1, 0.2]],
                                      pi=[0.5, 0.5], beta=0.1, c=2,
                                      piZ=[0.3, 0.3, 0.2, 0.2])

    def test_asymmetric_b(self):
        """B must be symmetric."""
        with self.assertRaisesRegex(model.ModelError, 'symmetric'):
            model.CovariateBlockModel(B=[[0.2, 0.1], [0.3, 0.2]],
                                      pi=[0.5, 0.5], beta=0.1, c=2)

    def test_one_level(self):
        """A covariate needs at least two levels."""
        with self.assertRaisesRegex(model.ModelError, 'levels'):
            model.CovariateBlockModel(B=[[0.2]], pi=[1.0], beta=0.1, c=1)

    def test_default_piz(self):
        """piZ defaults to splitting each block evenly across levels."""
        m = model.homogeneous_model(0.3, 0.1, 0.1, K=4, c=2)
        testing.assert_allclose(m.piZ, np.full(8, 0.125))
        self.assertEqual(m.expanded_blocks, 8)


class SampleTests(unittest.TestCase):
    """Tests for model.sample."""

    def test_balanced_counts(self):
        """Balanced sampling puts n/(Kc) vertices in each expanded block."""
        labeled = model.sample(model.rank_one_model(0.3, 0.668, 0.49), 100,
                               seed=7)
        testing.assert_array_equal(np.bincount(labeled.xi)[1:],
                                   [25, 25, 25, 25])
        A = labeled.graph.A
        testing.assert_array_equal(A, A.T)
        testing.assert_array_equal(np.diag(A), np.zeros(100))
        self.assertTrue(set(np.unique(A)) <= {0.0, 1.0})

    def test_label_consistency(self):
        """xi = (tau - 1) * c + Z for every vertex."""
        labeled = model.sample(model.homogeneous_model(0.3, 0.1, 0.1, K=3,
                                                       c=3), 90, seed=1,
                               balanced=False)
        testing.assert_array_equal(labeled.xi,
                                   (labeled.tau - 1) * 3 + labeled.Z)
        self.assertEqual(len(labeled.label_table()), 90)

    def test_determinism(self):
        """The same seed and trial give bit-identical graphs."""
        m = model.rank_one_model(0.3, 0.6, 0.1)
        first = model.sample(m, 40, seed=3, trial=2)
        second = model.sample(m, 40, seed=3, trial=2)
        other = model.sample(m, 40, seed=3, trial=3)
        testing.assert_array_equal(first.graph.A, second.graph.A)
        self.assertFalse(np.array_equal(first.graph.A, other.graph.A))

    def test_complete_graph(self):
        """Probability one everywhere yields the complete graph."""
        m = model.CovariateBlockModel(B=np.ones((2, 2)), pi=[0.5, 0.5],
                                      beta=0.0, c=2)
        A = model.sample(m, 8, seed=0).graph.A
        testing.assert_array_equal(A, np.ones((8, 8)) - np.eye(8))

    def test_indivisible_n(self):
        """Balanced sampling needs n divisible by K*c."""
        with self.assertRaisesRegex(model.ModelError, 'divisible'):
            model.sample(model.rank_one_model(0.3, 0.6, 0.1), 10, seed=0)

    def test_edge_density(self):
        """Block densities approach B_Z at n=2000."""
        m = model.rank_one_model(0.3, 0.6, 0.1)
        labeled = model.sample(m, 2000, seed=11)
        bz = model.build_bz(m)
        A = labeled.graph.A
        for k in range(4):
            rows = labeled.xi == k + 1
            for l in range(4):
                cols = labeled.xi == l + 1
                block = A[np.ix_(rows, cols)]
                pairs = block.size - (rows.sum() if k == l else 0)
                self.assertLess(abs(block.sum() / pairs - bz[k, l]), 0.02)


class ModelFamilyTests(unittest.TestCase):
    """Tests for model.rank_one_model and model.homogeneous_model."""

    def test_rank_one_b(self):
        """B is the outer product of (p, q)."""
        m = model.rank_one_model(0.3, 0.6, 0.1)
        testing.assert_allclose(m.B, [[0.09, 0.18], [0.18, 0.36]])

    def test_rank_one_equal(self):
        """p == q gives a single effective block."""
        m = model.rank_one_model(0.4, 0.4, 0.1)
        testing.assert_allclose(m.B, np.full((2, 2), 0.16))

    def test_rank_one_order(self):
        """p must not exceed q."""
        with self.assertRaises(model.ModelError):
            model.rank_one_model(0.6, 0.3, 0.1)

    def test_homogeneous_shape(self):
        """Five levels and two blocks give a 10x10 B_Z."""
        m = model.homogeneous_model(0.135, 0.1, 0.2, K=2, c=5)
        self.assertEqual(model.build_bz(m).shape, (10, 10))

    def test_homogeneous_max_entry(self):
        """The largest entry is a + beta."""
        m = model.homogeneous_model(0.3, 0.1, 0.2, K=4)
        self.assertAlmostEqual(model.build_bz(m).max(), 0.5)

    def test_homogeneous_equal(self):
        """a == b makes every entry of B equal."""
        m = model.homogeneous_model(0.2, 0.2, 0.1)
        testing.assert_allclose(m.B, np.full((2, 2), 0.2))

    def test_homogeneous_spectrum(self):
        """The numeric spectrum of B_Z matches the closed form."""
        for K in (2, 3, 5):
            m = model.homogeneous_model(0.3, 0.1, 0.2, K=K)
            testing.assert_allclose(
                np.linalg.eigvalsh(model.build_bz(m)),
                model.homogeneous_bz_eigenvalues(0.3, 0.1, 0.2, K),
                atol=1e-12)


class MakeRngTests(unittest.TestCase):
    """Tests for model.make_rng."""

    def test_streams(self):
        """Streams depend on every key."""
        first = model.make_rng(5, 0).random(4)
        testing.assert_array_equal(first, model.make_rng(5, 0).random(4))
        self.assertFalse(np.array_equal(first, model.make_rng(5, 1).random(4)))

    def test_negative_seed(self):
        """Seeds must be non-negative."""
        with self.assertRaises(model.ModelError):
            model.make_rng(-1)


if __name__ == '__main__':
    unittest.main()
