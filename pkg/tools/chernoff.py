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
"""Chernoff information of embedded blocks and the Chernoff ratio.

rho1 is the smallest pairwise Chernoff information among expanded blocks
seen by the adjacency-only pipeline; rho2 the same among induced blocks
after the covariate effect is removed. rho = rho1 / rho2 below 1 favors the
covariate-aware pipeline.
"""

import collections
import concurrent.futures
import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import linalg

try:
    import model as sbm_model
except ImportError:
    from sbmcov import model as sbm_model

logger = logging.getLogger(__name__)

GRID_POINTS = 99
T_TOLERANCE = 1e-10
_INV_PHI = (math.sqrt(5) - 1) / 2
_INV_PHI_SQ = (3 - math.sqrt(5)) / 2


class ChernoffError(ValueError):
    """Raised for configurations with no defined Chernoff information."""


class SingularCovarianceError(ChernoffError):
    """Raised when a covariance on the search path is singular."""


def golden_section_maximize(func, lo, hi, tol=T_TOLERANCE):
    """Return the maximizer of a unimodal |func| on [lo, hi]."""
    dist = hi - lo
    if dist <= tol:
        return (lo + hi) / 2
    steps = int(math.ceil(math.log(tol / dist) / math.log(_INV_PHI)))
    c = lo + _INV_PHI_SQ * dist
    d = lo + _INV_PHI * dist
    fc, fd = func(c), func(d)
    for _ in range(steps - 1):
        if fc > fd:
            hi, d, fd = d, c, fc
            dist *= _INV_PHI
            c = lo + _INV_PHI_SQ * dist
            fc = func(c)
        else:
            lo, c, fc = c, d, fd
            dist *= _INV_PHI
            d = lo + _INV_PHI * dist
            fd = func(d)
    return (lo + d) / 2 if fc > fd else (c + hi) / 2


def maximize_on_unit_interval(func, grid_points=GRID_POINTS, tol=T_TOLERANCE):
    """Return (max, argmax) of |func| over t in (0, 1).

    A uniform grid picks the bracket that golden-section search refines.
    """
    grid = np.arange(1, grid_points + 1) / (grid_points + 1)
    values = np.array([func(t) for t in grid])
    best = int(np.argmax(values))
    lo = grid[best - 1] if best > 0 else 0.0
    hi = grid[best + 1] if best < grid_points - 1 else 1.0
    t_star = golden_section_maximize(func, lo, hi, tol)
    t_star = min(max(t_star, tol), 1 - tol)
    value = func(t_star)
    if value < values[best]:
        return float(values[best]), float(grid[best])
    return float(value), float(t_star)


def _cholesky(matrix, what):
    try:
        return linalg.cho_factor(matrix, lower=True)
    except linalg.LinAlgError as e:
        raise SingularCovarianceError('%s is not positive definite' %
                                      what) from e


def _log_det(factor):
    return 2 * float(np.sum(np.log(np.diag(factor[0]))))


def gaussian_chernoff(mu1, sigma1, mu2, sigma2):
    """Chernoff information between N(mu1, sigma1) and N(mu2, sigma2).

    Returns (value, t_star) for the supremum over t of
    t(1-t)/2 dmu' S_t^-1 dmu + 1/2 log(|S_t| / (|S1|^t |S2|^(1-t))),
    where S_t = t S1 + (1-t) S2.
    """
    mu1, mu2 = np.atleast_1d(mu1).astype(float), np.atleast_1d(mu2).astype(
        float)
    sigma1 = np.atleast_2d(sigma1).astype(float)
    sigma2 = np.atleast_2d(sigma2).astype(float)
    d = mu1.size
    if (mu2.size != d or sigma1.shape != (d, d) or sigma2.shape != (d, d)):
        raise ChernoffError('mismatched dimensions')
    log_det1 = _log_det(_cholesky(sigma1, 'Sigma1'))
    log_det2 = _log_det(_cholesky(sigma2, 'Sigma2'))
    delta = mu1 - mu2

    def objective(t):
        factor = _cholesky(t * sigma1 + (1 - t) * sigma2, 'Sigma_t')
        quad = float(delta @ linalg.cho_solve(factor, delta))
        return (0.5 * t * (1 - t) * quad + 0.5 *
                (_log_det(factor) - t * log_det1 - (1 - t) * log_det2))

    return maximize_on_unit_interval(objective)


class LatentConfiguration(
        collections.namedtuple('LatentConfiguration',
                               ['nu', 'weights', 'signature'])):
    """Point-mass latent positions nu (one row per block) and their weights.

    signature is (d_plus, d_minus).
    """

    def __new__(cls, nu, weights, signature=None):
        nu = np.array(nu, dtype=float, ndmin=2)
        weights = np.array(weights, dtype=float, ndmin=1)
        if signature is None:
            signature = (nu.shape[1], 0)
        config = super().__new__(cls, nu, weights, tuple(signature))
        config.validate()
        return config

    @property
    def I(self):
        """The diagonal of I_{d+ d-}."""
        d_plus, d_minus = self.signature
        return np.concatenate([np.ones(d_plus), -np.ones(d_minus)])

    def gram(self):
        """Return nu I nu', the block connectivity matrix."""
        return (self.nu * self.I) @ self.nu.T

    def validate(self):
        """Raise ChernoffError unless the configuration is consistent."""
        m, d = self.nu.shape
        if sum(self.signature) != d:
            raise ChernoffError('signature %s does not match dimension %d' %
                                (self.signature, d))
        if self.weights.shape != (m,):
            raise ChernoffError('%d weights for %d positions' %
                                (self.weights.size, m))
        if np.any(self.weights <= 0) or abs(self.weights.sum() - 1) > 1e-12:
            raise ChernoffError('weights must be positive and sum to 1')
        gram = self.gram()
        if gram.min() < -1e-10 or gram.max() > 1 + 1e-10:
            raise ChernoffError('latent inner products leave [0, 1]')

    @staticmethod
    def from_block_matrix(B, weights, tol=1e-10):
        """Return positions E |Lambda|^(1/2) built from the eigenpairs of B."""
        values, vectors = linalg.eigh(np.asarray(B, dtype=float))
        scale = max(1.0, float(np.max(np.abs(values))))
        keep = np.abs(values) > tol * scale
        positive = np.flatnonzero(keep & (values > 0))
        negative = np.flatnonzero(keep & (values < 0))
        positive = positive[np.argsort(-values[positive])]
        negative = negative[np.argsort(values[negative])]
        order = np.concatenate([positive, negative])
        nu = vectors[:, order] * np.sqrt(np.abs(values[order]))
        return LatentConfiguration(nu, weights,
                                   (positive.size, negative.size))


def _second_moment(config):
    delta = (config.nu.T * config.weights) @ config.nu
    if np.linalg.matrix_rank(delta) < delta.shape[0]:
        raise SingularCovarianceError('second moment matrix is singular')
    return delta


def limiting_covariance(config, k):
    """Covariance of the limiting Gaussian of embedded block k.

    I Delta^-1 E_k Delta^-1 I, with Delta = sum_m w_m nu_m nu_m' and
    E_k = sum_m w_m g(nu_k, nu_m) nu_m nu_m', g(x, y) = x'Iy (1 - x'Iy).
    """
    delta = _second_moment(config)
    inner = (config.nu * config.I) @ config.nu[k]
    scaled = config.weights * inner * (1 - inner)
    e_k = (config.nu.T * scaled) @ config.nu
    delta_inv = linalg.inv(delta)
    covariance = (config.I[:, np.newaxis] * (delta_inv @ e_k @ delta_inv) *
                  config.I[np.newaxis, :])
    return (covariance + covariance.T) / 2


def limiting_covariances(config):
    """Return the limiting covariance of every block."""
    return [limiting_covariance(config, k) for k in range(config.nu.shape[0])]


def c_kl(config, k, l, covariances=None):
    """Return (C_kl, t_star) for blocks k and l of |config|.

    C_kl = sup_t t(1-t) (nu_k - nu_l)' (t S_k + (1-t) S_l)^-1 (nu_k - nu_l).
    """
    if k == l:
        raise ChernoffError('C_kl needs two distinct blocks')
    if covariances is None:
        sigma_k = limiting_covariance(config, k)
        sigma_l = limiting_covariance(config, l)
    else:
        sigma_k, sigma_l = covariances[k], covariances[l]
    diff = config.nu[k] - config.nu[l]

    def objective(t):
        factor = _cholesky(t * sigma_k + (1 - t) * sigma_l, 'Sigma_kl(t)')
        return t * (1 - t) * float(diff @ linalg.cho_solve(factor, diff))

    return maximize_on_unit_interval(objective)


def pairwise_chernoff(config, pairs=None):
    """Return (C, T): upper-triangular C_kl and t_star, NaN elsewhere."""
    m = config.nu.shape[0]
    covariances = limiting_covariances(config)
    values = np.full((m, m), np.nan)
    t_star = np.full((m, m), np.nan)
    if pairs is None:
        pairs = [(k, l) for k in range(m) for l in range(k + 1, m)]
    for k, l in pairs:
        values[k, l], t_star[k, l] = c_kl(config, k, l, covariances)
    return values, t_star


def _check_model(factory, *args):
    """Build the model to validate its parameters."""
    try:
        return factory(*args)
    except sbm_model.ModelError as e:
        raise ChernoffError('invalid model: %s' % e) from e


def canonical_positions_rank_one(p, q, beta):
    """Cholesky-style 4x3 positions for the rank-one model with c=2."""
    _check_model(sbm_model.rank_one_model, p, q, beta)
    if beta < 0:
        raise ChernoffError('canonical positions need beta >= 0')
    p2, pq = p * p, p * q
    s = math.sqrt(p2 + beta)
    r = math.sqrt((p2 + beta) * (2 * p2 + beta))
    tail = math.sqrt(beta * (q - p)**2 / (2 * p2 + beta))
    nu = np.array([
        [s, 0.0, 0.0],
        [p2 / s, math.sqrt(beta * (2 * p2 + beta) / (p2 + beta)), 0.0],
        [(pq + beta) / s, math.sqrt(beta) * p * (q - p) / r, tail],
        [pq / s, math.sqrt(beta) * (p2 + pq + beta) / r, tail],
    ])
    return LatentConfiguration(nu, np.full(4, 0.25), (3, 0))


def canonical_positions_homogeneous(a, b, beta, K):
    """Cholesky-style 2K x (K+1) positions for the homogeneous model.

    Rows are block-major with c=2. Blocks 3..K are appended recursively:
    the new block copies the previous block's leading columns, scales its
    last column by kappa and opens a new column.
    """
    _check_model(sbm_model.homogeneous_model, a, b, beta, K)
    if beta < 0:
        raise ChernoffError('canonical positions need beta >= 0')
    s = math.sqrt(a + beta)
    r = math.sqrt((a + beta) * (2 * a + beta))
    tail = math.sqrt(2 * (a - b) * (a + b + beta) / (2 * a + beta))
    nu = np.zeros((2 * K, K + 1))
    nu[:4, :3] = [
        [s, 0.0, 0.0],
        [a / s, math.sqrt(beta * (2 * a + beta) / (a + beta)), 0.0],
        [(b + beta) / s, math.sqrt(beta) * (b - a) / r, tail],
        [b / s, math.sqrt(beta) * (a + b + beta) / r, tail],
    ]
    for m in range(3, K + 1):
        previous = [2 * m - 4, 2 * m - 3]
        new = [2 * m - 2, 2 * m - 1]
        denominator = 2 * a + 2 * (m - 2) * b + (m - 1) * beta
        kappa = (2 * b + beta) / denominator
        nu[new, :m - 1] = nu[previous, :m - 1]
        nu[new, m - 1] = kappa * nu[previous, m - 1]
        nu[new, m] = math.sqrt(
            (a - b) * (2 * a + 2 * (m - 1) * b + m * beta) / denominator)
    return LatentConfiguration(nu, np.full(2 * K, 1.0 / (2 * K)), (K + 1, 0))


def rank_one_variances(p, q, pi=(0.5, 0.5)):
    """Return the limiting variances (sigma_p^2, sigma_q^2), no covariate."""
    pi1, pi2 = pi
    scale = (pi1 * p**2 + pi2 * q**2)**2
    sigma_p = (pi1 * p**4 * (1 - p**2) + pi2 * p * q**3 * (1 - p * q)) / scale
    sigma_q = (pi1 * p**3 * q * (1 - p * q) + pi2 * q**4 * (1 - q**2)) / scale
    return sigma_p, sigma_q


def rank_one_pair_chernoff(p, q, beta):
    """Closed-form C_12 and C_34 of the rank-one model with c=2."""
    phi_p, phi_q, phi_pq = p**2 * (1 - p**2), q**2 * (1 - q**2), p * q * (
        1 - p * q)
    return {
        'C12': beta**2 / (2 * (phi_p + phi_pq + beta *
                               (1 - p**2 - p * q - beta))),
        'C34': beta**2 / (2 * (phi_q + phi_pq + beta *
                               (1 - q**2 - p * q - beta))),
    }


def rank_one_rho2(p, q):
    """Closed-form Chernoff information between the two induced blocks."""
    phi_p, phi_q, phi_pq = p**2 * (1 - p**2), q**2 * (1 - q**2), p * q * (
        1 - p * q)
    root = (math.sqrt(p**2 * phi_p + q**2 * phi_pq) +
            math.sqrt(q**2 * phi_q + p**2 * phi_pq))
    return (p - q)**2 * (p**2 + q**2)**2 / (2 * root**2)


class _HomogeneousTerms(NamedTuple):
    phi_a: float
    phi_b: float
    phi_beta: float
    d4: float
    delta: float


def _homogeneous_terms(a, b, beta, K):
    phi_a, phi_b = a * (1 - a), b * (1 - b)
    phi_beta = beta * (1 - a - b - beta)
    d3 = K - 2 * a - 2 * (K - 1) * b - K * beta
    d4 = 2 * phi_a + 2 * (K - 1) * phi_b + beta * d3
    delta = (K**2 * beta**2 * (phi_a + phi_b + phi_beta) -
             2 * (a - b)**2 * d4)
    return _HomogeneousTerms(phi_a, phi_b, phi_beta, d4, delta)


def homogeneous_pair_chernoff(a, b, beta, K):
    """Closed-form C_12, C_13 and C_14 of the homogeneous model with c=2."""
    terms = _homogeneous_terms(a, b, beta, K)
    phi_a, phi_b, phi_beta = terms.phi_a, terms.phi_b, terms.phi_beta
    total = phi_a + phi_b + phi_beta
    n3 = (a - b)**2 * (2 * phi_b + beta * (1 + beta - 2 * b))
    n4 = (a - b)**3 * (1 - a - b - beta)
    d5 = (2 * beta * (a - b) *
          ((1 - a - b - beta) - 2 * (phi_a + phi_b) - phi_beta + 2 * b *
           (a + beta)) + K *
          (2 * phi_b * (phi_a + phi_b) - 2 * b * beta *
           (phi_b + a - b**2) - 2 * a * b * phi_beta + beta * (1 - beta) *
           (phi_a + (3 * b + beta) * (1 - beta) - a * beta - 5 * b**2)))
    return {
        'C12': K * beta**2 / (2 * terms.d4),
        'C13': (a - b)**2 / (K * total),
        'C14': ((K**2 * beta**2 * total + 2 * K * n3 + 4 * n4) /
                (2 * K * (2 * (phi_a**2 - phi_b**2) + d5))),
    }


def two_block_pair_chernoff(a, b, beta):
    """Closed-form C_12, C_13 and C_14 of the two-block homogeneous model."""
    phi_a, phi_b = a * (1 - a), b * (1 - b)
    phi_beta = beta * (1 - a - b - beta)
    total = phi_a + phi_b + phi_beta
    n1 = a * (1 - b) + b * (1 - a) + phi_beta
    n2 = a * b * (a - b) + phi_a * (a + beta) - phi_b * (b + beta)
    d1 = beta**2 * (1 - 2 * a - beta) * (1 - 2 * b - beta)
    return {
        'C12': beta**2 / (2 * total),
        'C13': (a - b)**2 / (2 * total),
        'C14': ((beta**2 * n1 + (a - b) * n2) /
                (2 * (d1 + (phi_a + phi_b) * (phi_a + phi_b + 2 * phi_beta)))),
    }


def two_block_rho(a, b, beta):
    """Chernoff ratio of the two-block homogeneous model, by regime.

    The level pair within a block is the closest while |beta| <= a - b.
    """
    phi_a, phi_b = a * (1 - a), b * (1 - b)
    total = phi_a + phi_b + beta * (1 - a - b - beta)
    if abs(beta) <= a - b:
        return beta**2 * (phi_a + phi_b) / ((a - b)**2 * total)
    return (phi_a + phi_b) / total


class ChernoffReport(NamedTuple):
    """Chernoff ratio with the pairwise values behind it."""
    rho1_star: float
    rho2_star: float
    rho_star: float
    pairwise_C: np.ndarray
    argmin_pair: Tuple[int, int]
    t_star: np.ndarray
    numeric_rho1_star: float
    closed_form: dict
    delta: Optional[float] = None


def _argmin_pair(values):
    k, l = np.unravel_index(np.nanargmin(values), values.shape)
    return int(k), int(l)


def rho_rank_one(p, q, beta):
    """Chernoff ratio of the two-block rank-one model with c=2."""
    config = canonical_positions_rank_one(p, q, beta)
    values, t_star = pairwise_chernoff(config)
    rho1 = float(np.nanmin(values))
    rho2 = rank_one_rho2(p, q)
    induced = LatentConfiguration([[p], [q]], [0.5, 0.5], (1, 0))
    closed_form = dict(rank_one_pair_chernoff(p, q, beta))
    closed_form['rho2_numeric'] = c_kl(induced, 0, 1)[0]
    return ChernoffReport(rho1_star=rho1, rho2_star=rho2,
                          rho_star=rho1 / rho2, pairwise_C=values,
                          argmin_pair=_argmin_pair(values), t_star=t_star,
                          numeric_rho1_star=rho1, closed_form=closed_form)


def rho_homogeneous(a, b, beta, K, numeric=True):
    """Closed-form Chernoff ratio of the K-block homogeneous model.

    With |numeric| and a non-negative effect the pairwise C_kl of the
    canonical positions are also computed and reported.
    """
    if not 0 < b < a < 1:
        raise ChernoffError('need 0 < b < a < 1, got a=%r b=%r' % (a, b))
    _check_model(sbm_model.homogeneous_model, a, b, beta, K)
    terms = _homogeneous_terms(a, b, beta, K)
    total = terms.phi_a + terms.phi_b + terms.phi_beta
    if terms.delta <= 0:
        rho1 = K * beta**2 / (2 * terms.d4)
        rho = (K**2 * beta**2 * (terms.phi_a + terms.phi_b) /
               (2 * (a - b)**2 * terms.d4))
    else:
        rho1 = (a - b)**2 / (K * total)
        rho = (terms.phi_a + terms.phi_b) / total
    rho2 = (a - b)**2 / (K * (terms.phi_a + terms.phi_b))
    closed_form = homogeneous_pair_chernoff(a, b, beta, K)

    m = 2 * K
    values = np.full((m, m), np.nan)
    t_star = np.full((m, m), np.nan)
    numeric_rho1 = float('nan')
    argmin_pair = (0, 1) if terms.delta <= 0 else (0, 2)
    if numeric and beta < 0:
        logger.info('no canonical positions for beta=%r; closed form only',
                    beta)
    elif numeric:
        values, t_star = pairwise_chernoff(
            canonical_positions_homogeneous(a, b, beta, K))
        numeric_rho1 = float(np.nanmin(values))
        argmin_pair = _argmin_pair(values)
    return ChernoffReport(rho1_star=rho1, rho2_star=rho2, rho_star=rho,
                          pairwise_C=values, argmin_pair=argmin_pair,
                          t_star=t_star, numeric_rho1_star=numeric_rho1,
                          closed_form=closed_form, delta=terms.delta)


class ChernoffGrid(NamedTuple):
    """rho_star over a rectangular parameter grid; NaN marks invalid cells."""
    axis1_name: str
    axis2_name: str
    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray


_FAMILIES = {
    'rank_one': ('q', 'beta'),
    'homogeneous': ('a', 'beta'),
    'homogeneous_k4': ('a', 'beta'),
}


def _grid_cell(family, fixed, x, y):
    try:
        if family == 'rank_one':
            return rho_rank_one(fixed['p'], x, y).rho_star
        K = 4 if family == 'homogeneous_k4' else fixed.get('K', 2)
        return rho_homogeneous(x, fixed['b'], y, K, numeric=False).rho_star
    except (sbm_model.ModelError, ChernoffError) as e:
        logger.debug('cell (%r, %r) missing: %s', x, y, e)
        return float('nan')


def chernoff_grid(family, fixed, axis1_range, axis2_range, resolution,
                  workers=1):
    """Evaluate rho_star on a resolution x resolution grid.

    Axis ranges are inclusive. Cells with an invalid model are NaN.
    """
    if family not in _FAMILIES:
        raise ChernoffError('unknown family %r; expected one of %s' %
                            (family, sorted(_FAMILIES)))
    if resolution < 1:
        raise ChernoffError('resolution must be positive')
    axis1 = np.linspace(axis1_range[0], axis1_range[1], resolution)
    axis2 = np.linspace(axis2_range[0], axis2_range[1], resolution)
    cells = [(x, y) for x in axis1 for y in axis2]
    args = ([family] * len(cells), [fixed] * len(cells),
            [x for x, _ in cells], [y for _, y in cells])
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(workers) as executor:
            flat = list(executor.map(_grid_cell, *args, chunksize=16))
    else:
        flat = list(map(_grid_cell, *args))
    name1, name2 = _FAMILIES[family]
    return ChernoffGrid(axis1_name=name1, axis2_name=name2, axis1=axis1,
                        axis2=axis2,
                        values=np.array(flat).reshape(resolution, resolution))
