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
"""Stochastic blockmodels with a categorical vertex covariate."""

import collections
import logging

import numpy as np

logger = logging.getLogger(__name__)

# Slack allowed on probability bounds and simplex sums.
_TOLERANCE = 1e-12


class ModelError(ValueError):
    """Raised when model parameters are inconsistent."""


def make_rng(seed, *keys):
    """Return a Philox generator keyed by (seed, *keys)."""
    if seed is None:
        raise ModelError('a seed is required')
    entropy = [int(seed)] + [int(key) for key in keys]
    if any(value < 0 for value in entropy):
        raise ModelError('seed and stream keys must be non-negative')
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy)))


class CovariateBlockModel(
        collections.namedtuple('CovariateBlockModel',
                               ['B', 'pi', 'beta', 'c', 'piZ'])):
    """A K-block SBM whose edges gain |beta| when endpoints share a level.

    Expanded blocks are ordered block-major: block 1 levels 1..c, then
    block 2 levels 1..c, and so on.
    """

    def __new__(cls, B, pi, beta, c, piZ=None):
        B = np.array(B, dtype=float, ndmin=2)
        pi = np.array(pi, dtype=float, ndmin=1)
        c = int(c)
        if piZ is None:
            piZ = np.repeat(pi, c) / c if c > 0 else np.empty(0)
        piZ = np.array(piZ, dtype=float, ndmin=1)
        model = super().__new__(cls, B, pi, float(beta), c, piZ)
        model.validate()
        return model

    @property
    def K(self):
        """Number of induced blocks."""
        return self.B.shape[0]

    @property
    def expanded_blocks(self):
        """Number of expanded blocks, K*c."""
        return self.K * self.c

    def validate(self):
        """Raise ModelError unless every invariant holds."""
        B, pi, piZ = self.B, self.pi, self.piZ
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] < 1:
            raise ModelError('B must be a non-empty square matrix')
        if not np.array_equal(B, B.T):
            raise ModelError('B must be symmetric')
        if self.c < 2:
            raise ModelError('covariate needs at least 2 levels, got %d' %
                             self.c)
        if pi.shape != (self.K,):
            raise ModelError('pi has %d entries for %d blocks' %
                             (pi.size, self.K))
        if piZ.shape != (self.expanded_blocks,):
            raise ModelError('piZ has %d entries for %d expanded blocks' %
                             (piZ.size, self.expanded_blocks))
        for name, weights in (('pi', pi), ('piZ', piZ)):
            if np.any(weights <= 0):
                raise ModelError('%s entries must be positive' % name)
            if abs(weights.sum() - 1) > _TOLERANCE:
                raise ModelError('%s must sum to 1, sums to %r' %
                                 (name, weights.sum()))
        marginal = piZ.reshape(self.K, self.c).sum(axis=1)
        if np.max(np.abs(marginal - pi)) > _TOLERANCE:
            raise ModelError('piZ does not marginalize to pi')
        _check_probabilities(B, 'B')
        _check_probabilities(_expanded(self), 'B_Z')

    def __repr__(self):
        return 'CovariateBlockModel(K=%d, c=%d, beta=%r)' % (self.K, self.c,
                                                            self.beta)


def _check_probabilities(matrix, name):
    low, high = matrix.min(), matrix.max()
    if low < -_TOLERANCE or high > 1 + _TOLERANCE:
        raise ModelError('%s entries must lie in [0, 1], found [%g, %g]' %
                         (name, low, high))


def _expanded(model):
    """Return B_Z before any range check."""
    K, c = model.B.shape[0], model.c
    return (np.kron(model.B, np.ones((c, c))) +
            model.beta * np.kron(np.ones((K, K)), np.eye(c)))


def build_bz(model):
    """Return the Kc x Kc expanded connectivity matrix B_Z.

    (B_Z)[(k,z),(l,z')] = B[k,l] + beta * 1{z == z'}. Entries within
    rounding slack of [0, 1] are clipped onto it.
    """
    bz = _expanded(model)
    _check_probabilities(bz, 'B_Z')
    return np.clip(bz, 0.0, 1.0)


class Graph(collections.namedtuple('Graph', ['n', 'A'])):
    """An undirected graph held as a dense symmetric adjacency matrix."""

    @staticmethod
    def from_adjacency(A):
        """Return a Graph after checking that A is square and symmetric."""
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ModelError('adjacency matrix must be square')
        if not np.array_equal(A, A.T):
            raise ModelError('adjacency matrix must be symmetric')
        return Graph(n=A.shape[0], A=A)

    def edges(self):
        """Return the (i, j) pairs with i < j and A[i, j] != 0."""
        rows, cols = np.nonzero(np.triu(self.A, 1))
        return list(zip(rows.tolist(), cols.tolist()))

    def __repr__(self):
        return 'Graph(n=%d, edges=%d)' % (self.n, len(self.edges()))


class LabeledSample(
        collections.namedtuple('LabeledSample', ['graph', 'tau', 'xi', 'Z'])):
    """A sampled graph with its induced, expanded and covariate labels.

    All labels are 1-based: tau in 1..K, xi in 1..Kc and Z in 1..c, with
    xi = (tau - 1) * c + Z.
    """

    def label_table(self):
        """Return (vertex, tau, xi, Z) rows for every vertex."""
        return [(vertex, int(t), int(x), int(z)) for vertex, (t, x, z) in
                enumerate(zip(self.tau, self.xi, self.Z))]


def sample(model, n, seed, balanced=True, trial=0):
    """Draw a LabeledSample of n vertices from |model|.

    Balanced mode assigns exactly n/(Kc) vertices to each expanded block in
    block-major order; otherwise expanded labels are drawn i.i.d. from piZ.
    """
    blocks = model.expanded_blocks
    if n < 2:
        raise ModelError('need at least 2 vertices, got %d' % n)
    if balanced:
        if n < blocks or n % blocks:
            raise ModelError(
                'balanced sampling needs n divisible by K*c=%d, got %d' %
                (blocks, n))
    bz = build_bz(model)
    rng = make_rng(seed, trial)
    if balanced:
        xi0 = np.repeat(np.arange(blocks), n // blocks)
    else:
        xi0 = rng.choice(blocks, size=n, p=model.piZ)
    probabilities = bz[np.ix_(xi0, xi0)]
    upper = np.triu(rng.random((n, n)) < probabilities, 1)
    A = (upper | upper.T).astype(float)
    logger.debug('sampled %d vertices, %d edges', n, int(upper.sum()))
    tau = xi0 // model.c + 1
    Z = xi0 % model.c + 1
    return LabeledSample(graph=Graph(n=n, A=A), tau=tau, xi=xi0 + 1, Z=Z)


def rank_one_model(p, q, beta, c=2):
    """Return the two-block rank-one model B = [[p^2, pq], [pq, q^2]]."""
    if not 0 < p <= q < 1:
        raise ModelError('rank-one model needs 0 < p <= q < 1, got p=%r q=%r'
                         % (p, q))
    nu = np.array([p, q], dtype=float)
    return CovariateBlockModel(B=np.outer(nu, nu), pi=[0.5, 0.5], beta=beta,
                               c=c)


def homogeneous_model(a, b, beta, K=2, c=2):
    """Return the K-block model with a on the diagonal and b elsewhere."""
    if not 0 < b <= a < 1:
        raise ModelError('homogeneous model needs 0 < b <= a < 1, got '
                         'a=%r b=%r' % (a, b))
    if K < 2:
        raise ModelError('homogeneous model needs K >= 2, got %d' % K)
    B = np.full((K, K), float(b))
    np.fill_diagonal(B, a)
    return CovariateBlockModel(B=B, pi=np.full(K, 1.0 / K), beta=beta, c=c)


def homogeneous_bz_eigenvalues(a, b, beta, K):
    """Return the closed-form spectrum of a homogeneous B_Z with c=2.

    Values are sorted ascending, matching numpy.linalg.eigvalsh.
    """
    values = ([0.0] * (K - 1) + [K * beta] + [2 * (a - b)] * (K - 1) +
              [2 * a + 2 * (K - 1) * b + K * beta])
    return np.sort(np.array(values))
