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
"""Unittests for the spectral module."""

import os
import unittest

import numpy as np
from numpy import testing

import chernoff
import model
import spectral


def _random_symmetric(n, eigenvalues, seed):
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.normal(size=(n, len(eigenvalues))))
    return (basis * eigenvalues) @ basis.T


class AseTests(unittest.TestCase):
    """Tests for spectral.ase."""

    def test_rank_one(self):
        """A rank-one P embeds to (p, p, q, q)."""
        nu = np.array([0.3, 0.3, 0.6, 0.6])
        P = np.outer(nu, nu)
        embedding = spectral.ase(P, 1)
        testing.assert_allclose(embedding.Y[:, 0], nu, atol=1e-10)
        testing.assert_allclose(embedding.Y @ embedding.Y.T, P, atol=1e-10)
        self.assertEqual((embedding.d_plus, embedding.d_minus), (1, 0))

    def test_zero_matrix(self):
        """All-zero input embeds to zero with the degenerate flag set."""
        embedding = spectral.ase(np.zeros((3, 3)), 1)
        self.assertTrue(embedding.degenerate)
        testing.assert_array_equal(embedding.Y, np.zeros((3, 1)))

    def test_expanded_block_matrix(self):
        """B_Z of the homogeneous model is PSD of rank 3."""
        bz = model.build_bz(model.homogeneous_model(0.3, 0.1, 0.2))
        embedding = spectral.ase(bz, 3)
        self.assertEqual((embedding.d_plus, embedding.d_minus), (3, 0))
        testing.assert_allclose(
            (embedding.Y * embedding.signature) @ embedding.Y.T, bz,
            atol=1e-10)

    def test_indefinite_order(self):
        """Positive eigenvalues come first regardless of magnitude."""
        A = _random_symmetric(6, [-3.0, 2.0, 0.5], seed=4)
        embedding = spectral.ase(A, 2)
        self.assertEqual((embedding.d_plus, embedding.d_minus), (1, 1))
        testing.assert_allclose(embedding.eigenvalues, [2.0, -3.0],
                                atol=1e-10)

    def test_reconstruction(self):
        """Full-rank embedding reproduces an indefinite matrix."""
        A = _random_symmetric(20, [3.0, -2.0, 1.0], seed=5)
        embedding = spectral.ase(A, 3)
        error = (embedding.Y * embedding.signature) @ embedding.Y.T - A
        self.assertLessEqual(np.linalg.norm(error),
                             1e-8 * np.linalg.norm(A))

    def test_permutation(self):
        """Permuting vertices permutes the rows of Y."""
        A = _random_symmetric(12, [4.0, 2.5], seed=6)
        perm = np.random.default_rng(0).permutation(12)
        embedding = spectral.ase(A, 2)
        permuted = spectral.ase(A[np.ix_(perm, perm)], 2)
        testing.assert_allclose(permuted.Y, embedding.Y[perm], atol=1e-10)

    def test_asymmetric(self):
        """Reject asymmetric input."""
        A = np.array([[0.0, 1.0], [0.5, 0.0]])
        with self.assertRaisesRegex(spectral.SpectralError, 'symmetric'):
            spectral.ase(A, 1)

    def test_dimension_range(self):
        """d must lie in [1, n)."""
        with self.assertRaises(spectral.SpectralError):
            spectral.ase(np.eye(3), 3)

    @unittest.skipUnless(os.environ.get('SBMCOV_SLOW'), 'slow statistical test')
    def test_central_limit(self):
        """Scaled embedding errors have the limiting variances."""
        p, q, n = 0.3, 0.6, 2000
        labeled = model.sample(model.rank_one_model(p, q, 0.0), n, seed=2)
        Y = spectral.ase(labeled.graph.A, 1).Y[:, 0]
        expected = chernoff.rank_one_variances(p, q)
        for block, value, variance in ((1, p, expected[0]),
                                       (2, q, expected[1])):
            errors = np.sqrt(n) * (Y[labeled.tau == block] - value)
            self.assertLess(abs(errors.var() / variance - 1), 0.15)


class TopEigenvaluesTests(unittest.TestCase):
    """Tests for spectral.top_eigenvalues."""

    def test_magnitude_order(self):
        """Values come back by descending magnitude with their sign."""
        A = _random_symmetric(8, [1.0, -5.0, 3.0], seed=1)
        testing.assert_allclose(spectral.top_eigenvalues(A, 3),
                                [-5.0, 3.0, 1.0], atol=1e-10)


class SelectDimensionTests(unittest.TestCase):
    """Tests for spectral.select_dimension."""

    def test_clear_gap(self):
        """A gap after three values selects d=3."""
        selection = spectral.select_dimension([10, 9.5, 9, 1, 0.9, 0.8])
        self.assertEqual(selection.chosen_d, 3)
        self.assertEqual(len(selection.profile_loglik), 5)

    def test_flat(self):
        """Equal magnitudes select the smallest split."""
        self.assertEqual(spectral.select_dimension([2.0] * 6).chosen_d, 1)

    def test_second_elbow(self):
        """The second elbow lies beyond the first."""
        values = [10, 5, 4.8, 1, 0.9]
        first = spectral.select_dimension(values, elbow=1)
        second = spectral.select_dimension(values, elbow=2)
        self.assertEqual(first.chosen_d, 1)
        self.assertEqual(second.chosen_d, 3)
        self.assertEqual(second.elbows, (1, 3))

    def test_signs_ignored(self):
        """Negative eigenvalues count by magnitude."""
        selection = spectral.select_dimension([-10, 9.5, 9, -1, 0.9, 0.8])
        self.assertEqual(selection.chosen_d, 3)

    def test_max_candidates(self):
        """Only the leading candidates are considered."""
        selection = spectral.select_dimension(
            [10, 9.5, 9, 1, 0.9, 0.8], max_candidates=4)
        self.assertEqual(len(selection.profile_loglik), 3)

    def test_too_short(self):
        """Reject spectra with fewer than two values."""
        with self.assertRaises(spectral.SpectralError):
            spectral.select_dimension([])
        with self.assertRaises(spectral.SpectralError):
            spectral.select_dimension([1.0])


if __name__ == '__main__':
    unittest.main()
