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
"""Adjacency spectral embedding and scree-plot dimension selection."""

import logging
from typing import NamedTuple, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from scipy.stats import norm

logger = logging.getLogger(__name__)

# Above this size only the leading eigenpairs are computed.
DENSE_EIGEN_LIMIT = 4096
SYMMETRY_TOLERANCE = 1e-10
DEFAULT_MAX_CANDIDATES = 100


class SpectralError(ValueError):
    """Raised for inputs that cannot be embedded."""


class Embedding(NamedTuple):
    """Embedded positions Y = E_d |Lambda_d|^(1/2).

    Columns hold positive eigenvalues first, each group by descending
    magnitude; |eigenvalues| is aligned with the columns of Y.
    """
    Y: np.ndarray
    d_plus: int
    d_minus: int
    eigenvalues: np.ndarray
    degenerate: bool = False

    @property
    def d(self):
        """Embedding dimension."""
        return self.d_plus + self.d_minus

    @property
    def signature(self):
        """Diagonal of I_{d+ d-} as a vector of +1 and -1."""
        return np.concatenate([np.ones(self.d_plus), -np.ones(self.d_minus)])


class ScreeSelection(NamedTuple):
    """Result of profile-likelihood dimension selection."""
    chosen_d: int
    profile_loglik: np.ndarray
    elbow_index: int
    elbows: Tuple[int, ...] = ()


def check_symmetric(A):
    """Raise SpectralError unless A is symmetric to relative tolerance."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SpectralError('expected a square matrix, got shape %s' %
                            (A.shape,))
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if A.size and np.max(np.abs(A - A.T)) > SYMMETRY_TOLERANCE * scale:
        raise SpectralError('matrix is not symmetric')


def _leading_eigenpairs(A, k):
    """Return the k eigenpairs of largest |eigenvalue|, by descending |.|."""
    n = A.shape[0]
    if n <= DENSE_EIGEN_LIMIT or k >= n - 1:
        values, vectors = scipy.linalg.eigh(A)
    else:
        values, vectors = scipy.sparse.linalg.eigsh(A, k=k, which='LM')
    # Stable sort keeps the eigh order among equal magnitudes.
    order = np.argsort(-np.abs(values), kind='stable')[:k]
    return values[order], vectors[:, order]


def top_eigenvalues(A, k=None):
    """Return the k signed eigenvalues of A with the largest magnitudes."""
    A = np.asarray(A, dtype=float)
    check_symmetric(A)
    n = A.shape[0]
    if k is None:
        k = min(n - 1, DEFAULT_MAX_CANDIDATES)
    if not 1 <= k <= n:
        raise SpectralError('cannot take %d eigenvalues of a %dx%d matrix' %
                            (k, n, n))
    values, _ = _leading_eigenpairs(A, k)
    return values


def ase(A, d):
    """Return the d-dimensional adjacency spectral embedding of A."""
    A = np.asarray(A, dtype=float)
    check_symmetric(A)
    n = A.shape[0]
    if not 1 <= d < n:
        raise SpectralError('embedding dimension must be in [1, %d), got %d'
                            % (n, d))
    values, vectors = _leading_eigenpairs(A, d)

    # Make the largest-magnitude entry of each eigenvector positive.
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(d)])
    signs[signs == 0] = 1.0
    vectors = vectors * signs

    scale = max(1.0, float(np.max(np.abs(values))))
    zero = np.abs(values) <= 1e-12 * scale
    degenerate = bool(np.any(zero))
    if degenerate:
        logger.warning('%d of %d retained eigenvalues are zero',
                       int(zero.sum()), d)
    positive = values >= 0
    order = np.concatenate([np.flatnonzero(positive),
                            np.flatnonzero(~positive)])
    values, vectors = values[order], vectors[:, order]
    Y = vectors * np.sqrt(np.abs(values))
    return Embedding(Y=Y, d_plus=int(positive.sum()),
                     d_minus=int((~positive).sum()), eigenvalues=values,
                     degenerate=degenerate)


def _profile_loglik(magnitudes):
    """Return the two-Gaussian profile log-likelihood of every split.

    Entry q-1 models the first q magnitudes and the remainder as Gaussians
    with a shared maximum-likelihood variance.
    """
    p = magnitudes.size
    floor = 1e-12 * max(1.0, float(np.mean(magnitudes**2)))
    profile = np.empty(p - 1)
    for q in range(1, p):
        head, tail = magnitudes[:q], magnitudes[q:]
        head_mean, tail_mean = head.mean(), tail.mean()
        variance = (np.sum((head - head_mean)**2) +
                    np.sum((tail - tail_mean)**2)) / p
        scale = np.sqrt(max(variance, floor))
        profile[q - 1] = (norm.logpdf(head, head_mean, scale).sum() +
                          norm.logpdf(tail, tail_mean, scale).sum())
    return profile


def select_dimension(eigenvalues, max_candidates=None, elbow=1):
    """Choose an embedding dimension from a scree of eigenvalues.

    The |elbow|-th elbow is found by re-running the search on the tail that
    follows the previous elbow.
    """
    magnitudes = np.sort(np.abs(np.asarray(eigenvalues, dtype=float)))[::-1]
    if max_candidates is not None:
        magnitudes = magnitudes[:max_candidates]
    if magnitudes.size < 2:
        raise SpectralError('need at least 2 eigenvalues, got %d' %
                            magnitudes.size)
    if elbow < 1:
        raise SpectralError('elbow must be >= 1, got %d' % elbow)

    first_profile = None
    elbows = []
    offset = 0
    tail = magnitudes
    while len(elbows) < elbow and tail.size >= 2:
        profile = _profile_loglik(tail)
        if first_profile is None:
            first_profile = profile
        # argmax keeps the smallest split among ties.
        offset += int(np.argmax(profile)) + 1
        elbows.append(offset)
        tail = magnitudes[offset:]
    if len(elbows) < elbow:
        logger.warning('only %d elbows available, wanted %d', len(elbows),
                       elbow)
    return ScreeSelection(chosen_d=elbows[-1], profile_loglik=first_profile,
                          elbow_index=len(elbows), elbows=tuple(elbows))
