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
"""Gaussian mixtures fitted by EM, BIC model selection and the ARI."""

import enum
import logging
from typing import NamedTuple, Tuple

import numpy as np
from scipy import linalg
from scipy.special import logsumexp
from sklearn.cluster import KMeans
from sklearn.metrics import adjusted_rand_score

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 10
DEFAULT_MAX_ITER = 500
DEFAULT_TOLERANCE = 1e-8
VARIANCE_FLOOR_SCALE = 1e-6
MONOTONE_SLACK = 1e-9


class ClusteringError(ValueError):
    """Raised when a mixture cannot be fitted to the given data."""


class CovarianceType(enum.Enum):
    """Covariance structure of the mixture components."""
    FULL = 'full'
    TIED = 'tied'
    DIAG = 'diag'
    SPHERICAL = 'spherical'

    def __str__(self):
        return self.value


ALL_COVARIANCE_TYPES = tuple(CovarianceType)


class GmmFit(NamedTuple):
    """A fitted Gaussian mixture.

    Labels are 1-based component indices.
    """
    K_hat: int
    means: np.ndarray
    covariances: np.ndarray
    weights: np.ndarray
    labels: np.ndarray
    loglik: float
    bic: float
    loglik_trace: Tuple[float, ...]
    converged: bool
    degenerate: bool
    n_parameters: int
    candidate_bics: Tuple[Tuple[int, str, float], ...] = ()
    covariance_type: CovarianceType = CovarianceType.FULL


def _as_samples(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ClusteringError('expected an n x d matrix, got shape %s' %
                              (X.shape,))
    if not np.all(np.isfinite(X)):
        raise ClusteringError('data contains non-finite values')
    return np.ascontiguousarray(X)


def variance_floor(X):
    """Return 1e-6 * trace(cov(X)) / d, or 1e-6 for constant data."""
    total = float(np.trace(np.atleast_2d(np.cov(X, rowvar=False, bias=True))))
    floor = VARIANCE_FLOOR_SCALE * total / X.shape[1]
    return floor if floor > 0 else VARIANCE_FLOOR_SCALE


def n_parameters(K, d, covariance_type=CovarianceType.FULL):
    """Free parameters of a K-component mixture in d dimensions."""
    covariance_params = {
        CovarianceType.FULL: K * d * (d + 1) // 2,
        CovarianceType.TIED: d * (d + 1) // 2,
        CovarianceType.DIAG: K * d,
        CovarianceType.SPHERICAL: K,
    }[CovarianceType(covariance_type)]
    return K - 1 + K * d + covariance_params


def _floor_covariance(covariance, floor):
    """Raise eigenvalues of |covariance| to |floor|; report if clipped."""
    values, vectors = linalg.eigh(covariance)
    if values.min() >= floor:
        return covariance, False
    values = np.maximum(values, floor)
    clipped = (vectors * values) @ vectors.T
    return (clipped + clipped.T) / 2, True


class _Mixture:
    """Mutable EM state for one restart."""

    def __init__(self, X, K, covariance_type, floor):
        self.X = X
        self.K = K
        self.covariance_type = covariance_type
        self.floor = floor
        self.weights = None
        self.means = None
        self.covariances = None
        self.floored = False

    def m_step(self, resp):
        """Maximize the expected complete log-likelihood."""
        n, d = self.X.shape
        nk = resp.sum(axis=0) + 10 * np.finfo(float).eps
        self.weights = nk / nk.sum()
        self.means = (resp.T @ self.X) / nk[:, np.newaxis]
        scatter = np.empty((self.K, d, d))
        for k in range(self.K):
            diff = self.X - self.means[k]
            scatter[k] = (resp[:, k] * diff.T) @ diff
        if self.covariance_type is CovarianceType.TIED:
            covariances = np.repeat(scatter.sum(axis=0)[np.newaxis] / n,
                                    self.K, axis=0)
        else:
            covariances = scatter / nk[:, np.newaxis, np.newaxis]
        if self.covariance_type is CovarianceType.DIAG:
            covariances = np.array([np.diag(np.diag(c)) for c in covariances])
        elif self.covariance_type is CovarianceType.SPHERICAL:
            covariances = np.array([np.trace(c) / d * np.eye(d)
                                    for c in covariances])
        self.covariances = np.empty((self.K, d, d))
        self.floored = False
        for k in range(self.K):
            covariance, clipped = _floor_covariance(covariances[k],
                                                    self.floor)
            self.covariances[k] = covariance
            self.floored |= clipped

    def weighted_log_prob(self):
        """Return log(w_k) + log N(x_i | mu_k, Sigma_k) for every i, k."""
        n, d = self.X.shape
        log_prob = np.empty((n, self.K))
        for k in range(self.K):
            cholesky = linalg.cholesky(self.covariances[k], lower=True)
            solved = linalg.solve_triangular(cholesky,
                                             (self.X - self.means[k]).T,
                                             lower=True)
            log_det = 2 * np.sum(np.log(np.diag(cholesky)))
            log_prob[:, k] = -0.5 * (d * np.log(2 * np.pi) + log_det +
                                     np.sum(solved**2, axis=0))
        return log_prob + np.log(self.weights)


def _initial_responsibilities(X, K, random_state):
    """Hard-assign points by one k-means run."""
    labels = KMeans(n_clusters=K, n_init=1,
                    random_state=random_state).fit(X).labels_
    resp = np.zeros((X.shape[0], K))
    resp[np.arange(X.shape[0]), labels] = 1.0
    return resp


def _run_em(X, K, covariance_type, floor, random_state, max_iter, tol):
    mixture = _Mixture(X, K, covariance_type, floor)
    mixture.m_step(_initial_responsibilities(X, K, random_state))
    ever_floored = mixture.floored
    trace = []
    converged = False
    for iteration in range(max_iter):
        log_prob = mixture.weighted_log_prob()
        log_norm = logsumexp(log_prob, axis=1)
        loglik = float(log_norm.sum())
        if trace:
            previous = trace[-1]
            if not mixture.floored:
                assert loglik >= previous - MONOTONE_SLACK * max(
                    1.0, abs(previous)), 'EM log-likelihood decreased'
            if abs(loglik - previous) <= tol * abs(previous):
                trace.append(loglik)
                converged = True
                break
        trace.append(loglik)
        if iteration == max_iter - 1:
            break
        mixture.m_step(np.exp(log_prob - log_norm[:, np.newaxis]))
        ever_floored |= mixture.floored
        logger.debug('EM K=%d iteration %d loglik %.10g', K, iteration,
                     loglik)
    return mixture, log_prob, trace, converged, ever_floored


def fit_gmm(X, K, seed, n_init=DEFAULT_RESTARTS,
            covariance_type=CovarianceType.FULL, max_iter=DEFAULT_MAX_ITER,
            tol=DEFAULT_TOLERANCE):
    """Fit a K-component Gaussian mixture to X by EM.

    The restart with the highest log-likelihood is kept; earlier restarts
    win ties.
    """
    X = _as_samples(X)
    n, d = X.shape
    covariance_type = CovarianceType(covariance_type)
    if K < 1:
        raise ClusteringError('need at least one component, got %d' % K)
    if n < K:
        raise ClusteringError('cannot fit %d components to %d points' %
                              (K, n))
    floor = variance_floor(X)
    rng = np.random.default_rng(seed)

    best = None
    for _ in range(max(1, n_init)):
        random_state = int(rng.integers(np.iinfo(np.int32).max))
        result = _run_em(X, K, covariance_type, floor, random_state,
                         max_iter, tol)
        if best is None or result[2][-1] > best[2][-1]:
            best = result
    mixture, log_prob, trace, converged, floored = best
    if not converged:
        logger.warning('EM with K=%d stopped after %d iterations', K,
                       max_iter)
    if floored:
        logger.warning('variance floor %.3g engaged for K=%d', floor, K)

    loglik = trace[-1]
    params = n_parameters(K, d, covariance_type)
    return GmmFit(K_hat=K, means=mixture.means,
                  covariances=mixture.covariances, weights=mixture.weights,
                  labels=np.argmax(log_prob, axis=1) + 1, loglik=loglik,
                  bic=-2 * loglik + params * np.log(n),
                  loglik_trace=tuple(trace), converged=converged,
                  degenerate=floored, n_parameters=params,
                  covariance_type=covariance_type)


def select_k_bic(X, K_range, seed, covariance_types=None, **kwargs):
    """Fit every K and covariance type; keep the fit with the lowest BIC.

    Smaller K wins ties, then the earlier entry of |covariance_types|.
    Without |covariance_types| only the |covariance_type| keyword (full by
    default) is searched.
    """
    X = _as_samples(X)
    candidates = sorted(set(int(k) for k in K_range))
    if not candidates:
        raise ClusteringError('K_range is empty')
    if candidates[-1] > X.shape[0]:
        raise ClusteringError('K_range reaches %d but only %d points' %
                              (candidates[-1], X.shape[0]))
    if covariance_types is None:
        covariance_types = (kwargs.pop('covariance_type',
                                       CovarianceType.FULL),)
    else:
        kwargs.pop('covariance_type', None)
    covariance_types = [CovarianceType(t) for t in covariance_types]
    if not covariance_types:
        raise ClusteringError('no covariance types to search')
    best = None
    bics = []
    for K in candidates:
        for covariance_type in covariance_types:
            fit = fit_gmm(X, K, seed, covariance_type=covariance_type,
                          **kwargs)
            bics.append((K, str(covariance_type), fit.bic))
            if best is None or fit.bic < best.bic:
                best = fit
    logger.info('BIC selected K=%d (%s) from %s', best.K_hat,
                best.covariance_type, candidates)
    return best._replace(candidate_bics=tuple(bics))


def ari(labels_a, labels_b):
    """Return the Hubert-Arabie adjusted Rand index of two labelings."""
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    if labels_a.shape != labels_b.shape or labels_a.ndim != 1:
        raise ClusteringError('labelings must be 1-D and of equal length, '
                              'got %s and %s' %
                              (labels_a.shape, labels_b.shape))
    if labels_a.size < 2:
        raise ClusteringError('need at least 2 labels, got %d' %
                              labels_a.size)
    return float(adjusted_rand_score(labels_a, labels_b))
