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
"""Induced block recovery with and without the vertex covariate.

algo1 clusters the embedding of A into expanded blocks and merges those
whose estimated within-block connectivity agrees. algo2 first removes the
covariate effect from A and then clusters directly into induced blocks.
"""

import enum
import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np

try:
    import cluster
    import spectral
except ImportError:
    from sbmcov import cluster
    from sbmcov import spectral

logger = logging.getLogger(__name__)

FLAG_K_NOT_DIVISIBLE = 'k_not_divisible'
FLAG_SINGLE_CLUSTER = 'single_cluster'
FLAG_DEGENERATE_EMBEDDING = 'degenerate_embedding'
FLAG_SA_FAILED = 'sa_failed'


class InferenceError(ValueError):
    """Raised when a pipeline stage cannot proceed."""


class EmptyPairSetError(InferenceError):
    """Raised when no entry pairs isolate the covariate effect."""


class BetaMethod(enum.Enum):
    """How algo2 obtains the covariate effect size."""
    SA = 'SA'
    WA = 'WA'
    BOTH = 'both'
    KNOWN = 'known'

    def __str__(self):
        return self.value


class Algo1Result(NamedTuple):
    """Labels and estimates produced by algo1.

    xi_hat and tau_hat are 1-based; phi_hat[k-1] is the induced cluster of
    expanded cluster k.
    """
    xi_hat: np.ndarray
    B_hat_Z: np.ndarray
    phi_hat: np.ndarray
    tau_hat: np.ndarray
    d_hat: int
    K_hat: int
    embedding: spectral.Embedding
    flags: Tuple[str, ...] = ()


class Algo2Result(NamedTuple):
    """Labels and estimates produced by algo2."""
    beta_hat: float
    method: BetaMethod
    A_tilde: np.ndarray
    tau_tilde: np.ndarray
    d_tilde: int
    Y_tilde: np.ndarray
    stage1: Algo1Result
    beta_sa: Optional[float] = None
    beta_wa: Optional[float] = None
    flags: Tuple[str, ...] = ()


def choose_dimension(A, d=None, max_candidates=None, elbow=1):
    """Return d if given, otherwise the scree elbow of A's spectrum."""
    if d is not None:
        return int(d)
    n = np.asarray(A).shape[0]
    if max_candidates is None:
        max_candidates = min(n - 1, spectral.DEFAULT_MAX_CANDIDATES)
    eigenvalues = spectral.top_eigenvalues(A, max_candidates)
    selection = spectral.select_dimension(eigenvalues, elbow=elbow)
    logger.info('scree elbows %s, chose d=%d', selection.elbows,
                selection.chosen_d)
    return selection.chosen_d


def default_k_range(c):
    """Candidate expanded-block counts tried by BIC: c through 4c."""
    return range(c, 4 * c + 1)


def induced_cluster_count(K_hat, c):
    """Return (K_hat / c, flags), rounding when c does not divide K_hat."""
    if K_hat < c:
        raise InferenceError('found %d expanded blocks, fewer than the %d '
                             'covariate levels' % (K_hat, c))
    if K_hat % c:
        count = max(1, int(round(K_hat / c)))
        logger.warning('K_hat=%d is not divisible by c=%d; using %d induced '
                       'blocks', K_hat, c, count)
        return count, (FLAG_K_NOT_DIVISIBLE,)
    return K_hat // c, ()


def block_diagonal_clusters(B_hat_Z, xi_hat, n_induced, seed=0):
    """Merge expanded clusters by clustering the diagonal of B_hat_Z.

    Returns (phi_hat, tau_hat), both 1-based.
    """
    diagonal = np.diag(np.asarray(B_hat_Z, dtype=float))
    if n_induced > diagonal.size:
        raise InferenceError('cannot split %d diagonal entries into %d '
                             'clusters' % (diagonal.size, n_induced))
    fit = cluster.fit_gmm(diagonal.reshape(-1, 1), n_induced, seed)
    phi_hat = fit.labels
    tau_hat = phi_hat[np.asarray(xi_hat) - 1]
    return phi_hat, tau_hat


def algo1(graph, c, d=None, K=None, K_range=None, seed=0, elbow=1,
          max_candidates=None,
          covariance_types=cluster.ALL_COVARIANCE_TYPES):
    """Recover induced blocks from the adjacency matrix alone.

    BIC picks the covariance structure from |covariance_types|, and K_hat as
    well when |K| is not fixed.
    """
    if c < 2:
        raise InferenceError('need at least 2 covariate levels, got %d' % c)
    A = graph.A
    flags = []
    d_hat = choose_dimension(A, d, max_candidates, elbow)
    embedding = spectral.ase(A, d_hat)
    if embedding.degenerate:
        flags.append(FLAG_DEGENERATE_EMBEDDING)

    if K is not None:
        candidates = [K]
    else:
        candidates = [k for k in (K_range or default_k_range(c))
                      if k <= graph.n]
    fit = cluster.select_k_bic(embedding.Y, candidates, seed,
                               covariance_types=covariance_types)

    B_hat_Z = (fit.means * embedding.signature) @ fit.means.T
    B_hat_Z = (B_hat_Z + B_hat_Z.T) / 2

    n_induced, count_flags = induced_cluster_count(fit.K_hat, c)
    flags.extend(count_flags)
    phi_hat, tau_hat = block_diagonal_clusters(B_hat_Z, fit.labels,
                                               n_induced, seed)
    return Algo1Result(xi_hat=fit.labels, B_hat_Z=B_hat_Z, phi_hat=phi_hat,
                       tau_hat=tau_hat, d_hat=d_hat, K_hat=fit.K_hat,
                       embedding=embedding, flags=tuple(flags))


def _level_fractions(xi_hat, Z, K_hat):
    """Return (levels, F) with F[k, z] the share of cluster k at level z."""
    xi_hat = np.asarray(xi_hat)
    levels, codes = np.unique(np.asarray(Z), return_inverse=True)
    if xi_hat.shape != codes.shape:
        raise InferenceError('%d cluster labels but %d covariates' %
                             (xi_hat.size, codes.size))
    counts = np.zeros((K_hat, levels.size))
    np.add.at(counts, (xi_hat - 1, codes), 1)
    sizes = counts.sum(axis=1, keepdims=True)
    if np.any(sizes == 0):
        logger.warning('%d expanded clusters are empty',
                       int(np.sum(sizes == 0)))
    # Empty clusters keep an all-zero row.
    return levels, counts / np.maximum(sizes, 1)


def _check_inputs(B_hat_Z, xi_hat, phi_hat):
    B_hat_Z = np.asarray(B_hat_Z, dtype=float)
    phi_hat = np.asarray(phi_hat)
    K_hat = B_hat_Z.shape[0]
    if B_hat_Z.shape != (K_hat, K_hat) or phi_hat.shape != (K_hat,):
        raise InferenceError('B_hat_Z is %s but phi_hat has %d entries' %
                             (B_hat_Z.shape, phi_hat.size))
    if np.min(xi_hat) < 1 or np.max(xi_hat) > K_hat:
        raise InferenceError('cluster labels must lie in 1..%d' % K_hat)
    return B_hat_Z, phi_hat, K_hat


def estimate_beta_sa(B_hat_Z, xi_hat, phi_hat, Z):
    """Simple-average estimate of the covariate effect size.

    Each cluster takes its modal covariate level (lowest level on ties).
    Averages B[k,l] - B[k,l'] over triples where l and l' share an induced
    cluster, l has k's modal level and l' does not.
    """
    B_hat_Z, phi_hat, K_hat = _check_inputs(B_hat_Z, xi_hat, phi_hat)
    _, fractions = _level_fractions(xi_hat, Z, K_hat)
    mode = np.argmax(fractions, axis=1)
    occupied = fractions.sum(axis=1) > 0

    same_phi = (phi_hat[:, np.newaxis] == phi_hat[np.newaxis, :]) & np.outer(
        occupied, occupied)
    same_mode = mode[:, np.newaxis] == mode[np.newaxis, :]
    differences = []
    for k in np.flatnonzero(occupied):
        pairs = (same_phi & same_mode[k][:, np.newaxis] &
                 ~same_mode[k][np.newaxis, :])
        ell, ell_prime = np.nonzero(pairs)
        differences.extend(B_hat_Z[k, ell] - B_hat_Z[k, ell_prime])
    if not differences:
        raise EmptyPairSetError(
            'no entry pairs isolate the covariate effect; use the '
            'weighted-average estimator (method WA) instead')
    return float(np.mean(differences))


def estimate_beta_wa(B_hat_Z, xi_hat, phi_hat, Z, normalization='weighted'):
    """Weighted-average estimate of the covariate effect size.

    The weight of (k, l, l') is the probability that random members of
    clusters k and l share a level that a member of l' lacks. W holds the
    ordered pairs (l, l') with matching induced cluster. 'weighted' divides
    by the total weight and leaves out l == l', whose difference is zero;
    'pairs' divides by K_hat * |W| over all of W.
    """
    B_hat_Z, phi_hat, K_hat = _check_inputs(B_hat_Z, xi_hat, phi_hat)
    _, fractions = _level_fractions(xi_hat, Z, K_hat)
    occupied = fractions.sum(axis=1) > 0
    pairs = ((phi_hat[:, np.newaxis] == phi_hat[np.newaxis, :]) &
             np.outer(occupied, occupied))
    if normalization == 'weighted':
        np.fill_diagonal(pairs, False)
    ell, ell_prime = np.nonzero(pairs)
    if ell.size == 0:
        raise EmptyPairSetError('no pairs share an induced cluster')

    # weights[k, w] = sum_z F[k,z] F[l,z] (1 - F[l',z]) for w = (l, l').
    weights = fractions @ (fractions[ell] * (1 - fractions[ell_prime])).T
    differences = B_hat_Z[:, ell] - B_hat_Z[:, ell_prime]
    total = float(np.sum(weights * differences))
    if normalization == 'pairs':
        return total / (K_hat * ell.size)
    if normalization != 'weighted':
        raise InferenceError('unknown normalization %r' % normalization)
    weight_sum = float(np.sum(weights))
    if weight_sum <= 0:
        raise EmptyPairSetError('every pair has zero weight; clusters share '
                                'a single covariate level')
    return total / weight_sum


def adjust_adjacency(A, Z, beta):
    """Return A - beta * 1{Z_i == Z_j} with a zero diagonal."""
    Z = np.asarray(Z)
    A_tilde = A - beta * (Z[:, np.newaxis] == Z[np.newaxis, :])
    np.fill_diagonal(A_tilde, 0.0)
    return A_tilde


def algo2(graph, Z, beta_known=None, method=BetaMethod.WA, d=None, d2=None,
          K=None, K_range=None, K_induced=None, seed=0, elbow=1,
          max_candidates=None, reselect_bic=False, stage1=None,
          covariance_types=cluster.ALL_COVARIANCE_TYPES, c=None):
    """Recover induced blocks after removing the covariate effect.

    |c| is the number of covariate levels in the model; it defaults to the
    number of levels observed in Z.
    """
    Z = np.asarray(Z)
    if Z.shape != (graph.n,):
        raise InferenceError('expected %d covariates, got %d' %
                             (graph.n, Z.size))
    observed = np.unique(Z).size
    if c is None:
        c = observed
    elif observed > c:
        raise InferenceError('Z has %d levels but c=%d' % (observed, c))
    elif observed < c:
        logger.warning('only %d of %d covariate levels occur in Z',
                       observed, c)
    method = BetaMethod(method)
    if stage1 is None:
        stage1 = algo1(graph, c, d=d, K=K, K_range=K_range, seed=seed,
                       elbow=elbow, max_candidates=max_candidates,
                       covariance_types=covariance_types)
    flags = list(stage1.flags)

    beta_sa = beta_wa = None
    if beta_known is not None:
        beta_hat = float(beta_known)
        method = BetaMethod.KNOWN
    elif method is BetaMethod.SA:
        beta_hat = beta_sa = estimate_beta_sa(stage1.B_hat_Z, stage1.xi_hat,
                                              stage1.phi_hat, Z)
    else:
        beta_hat = beta_wa = estimate_beta_wa(stage1.B_hat_Z, stage1.xi_hat,
                                              stage1.phi_hat, Z)
        if method is BetaMethod.BOTH:
            try:
                beta_sa = estimate_beta_sa(stage1.B_hat_Z, stage1.xi_hat,
                                           stage1.phi_hat, Z)
            except EmptyPairSetError as e:
                logger.warning('%s', e)
                flags.append(FLAG_SA_FAILED)
    logger.info('beta_hat=%.6g (%s)', beta_hat, method)

    A_tilde = adjust_adjacency(graph.A, Z, beta_hat)
    d_tilde = choose_dimension(A_tilde, d2, max_candidates, elbow)
    embedding = spectral.ase(A_tilde, d_tilde)

    if K_induced is None:
        K_induced, _ = induced_cluster_count(stage1.K_hat, c)
    if reselect_bic:
        candidates = [k for k in range(1, 2 * K_induced + 1)
                      if k <= graph.n]
    else:
        candidates = [K_induced]
    fit = cluster.select_k_bic(embedding.Y, candidates, seed,
                               covariance_types=covariance_types)
    if fit.K_hat < 2:
        logger.warning('algo2 produced a single induced block')
        flags.append(FLAG_SINGLE_CLUSTER)
    return Algo2Result(beta_hat=beta_hat, method=method, A_tilde=A_tilde,
                       tau_tilde=fit.labels, d_tilde=d_tilde,
                       Y_tilde=embedding.Y, stage1=stage1, beta_sa=beta_sa,
                       beta_wa=beta_wa, flags=tuple(flags))
