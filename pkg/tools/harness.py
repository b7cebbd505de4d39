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
"""Monte-Carlo experiments over simulated graphs and their CSV output."""

import collections
import concurrent.futures
import csv
import json
import logging
import math
import os
import time
from typing import NamedTuple, Optional, Tuple

import numpy as np

try:
    import cluster
    import inference
    import model as sbm_model
except ImportError:
    from sbmcov import cluster
    from sbmcov import inference
    from sbmcov import model as sbm_model

logger = logging.getLogger(__name__)

WORKERS_ENV = 'SBMCOV_WORKERS'
FAMILIES = ('rank_one', 'homogeneous')

METRICS = ('beta_hat', 'ari_algo1', 'ari_algo2_known', 'ari_algo2_est')
TIMINGS = ('elapsed_algo1', 'elapsed_algo2')
PARAMETER_COLUMNS = ('name', 'family', 'n', 'p', 'q', 'a', 'b', 'K', 'beta',
                     'c', 'd', 'd2', 'method', 'balanced', 'trials', 'seed')


class ExperimentError(ValueError):
    """Raised for invalid experiment descriptions or failed runs."""


def default_workers():
    """Worker count from the environment, 1 when unset."""
    value = os.environ.get(WORKERS_ENV, '1')
    try:
        workers = int(value)
    except ValueError as e:
        raise ExperimentError('%s must be an integer, got %r' %
                              (WORKERS_ENV, value)) from e
    return max(1, workers)


_SPEC_FIELDS = ('name', 'family', 'n', 'trials', 'seed', 'beta', 'c', 'p',
                'q', 'a', 'b', 'K', 'd', 'd2', 'gmm_components', 'k_max',
                'method', 'balanced', 'quick_trials')


class ExperimentSpec(
        collections.namedtuple('ExperimentSpec', _SPEC_FIELDS,
                               defaults=('', 'rank_one', 100, 1, None, 0.0,
                                         2, None, None, None, None, 2, None,
                                         None, None, None, 'WA', True,
                                         None))):
    """One experiment: a model, a sample size and how to analyse it.

    d2 defaults to d. gmm_components fixes K_hat; otherwise BIC searches
    c..k_max (default 4c).
    """

    def validate(self):
        """Raise ExperimentError unless the spec can be run."""
        if self.family not in FAMILIES:
            raise ExperimentError('unknown family %r' % self.family)
        if self.trials is None or self.trials < 1:
            raise ExperimentError('trials must be >= 1')
        if self.method not in ('SA', 'WA', 'both'):
            raise ExperimentError('method must be SA, WA or both, got %r' %
                                  (self.method,))
        try:
            self.build_model()
        except (sbm_model.ModelError, TypeError) as e:
            raise ExperimentError('invalid model: %s' % e) from e
        return self

    def build_model(self):
        """Return the CovariateBlockModel this spec describes."""
        if self.family == 'rank_one':
            return sbm_model.rank_one_model(self.p, self.q, self.beta, self.c)
        return sbm_model.homogeneous_model(self.a, self.b, self.beta, self.K,
                                           self.c)

    @property
    def k_range(self):
        """Candidate K_hat values for BIC."""
        upper = self.k_max if self.k_max is not None else 4 * self.c
        return range(self.c, upper + 1)

    @property
    def second_dimension(self):
        """Embedding dimension of the adjusted matrix."""
        return self.d2 if self.d2 is not None else self.d

    def with_overrides(self, **overrides):
        """Return a validated copy with non-None |overrides| applied."""
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return self._replace(**overrides).validate()

    def quick(self):
        """Return the reduced-trial variant."""
        if self.quick_trials is None:
            return self
        return self._replace(trials=self.quick_trials)

    @staticmethod
    def load_from_json(json_path):
        """Return an ExperimentSpec from a flat .json file."""
        with open(json_path, 'r') as json_file:
            values = json.load(json_file)
        if not isinstance(values, dict):
            raise ExperimentError('%s: expected a JSON object' % json_path)
        unknown = sorted(set(values) - set(_SPEC_FIELDS))
        if unknown:
            raise ExperimentError('%s: unknown keys %s' %
                                  (json_path, ', '.join(unknown)))
        values.setdefault('name', os.path.splitext(
            os.path.basename(str(json_path)))[0])
        return ExperimentSpec(**values).validate()


class TrialRecord(NamedTuple):
    """Outcome of one simulated trial. Missing values are NaN."""
    trial: int
    beta_hat: float = math.nan
    ari_algo1: float = math.nan
    ari_algo2_known: float = math.nan
    ari_algo2_est: float = math.nan
    elapsed_algo1: float = math.nan
    elapsed_algo2: float = math.nan
    error: str = ''


def trial_seed(seed, trial):
    """Seed for the clustering stages of one trial."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])


def _analyse(graph, Z, truth, c, spec_like, seed, beta_known):
    """Run both pipelines on |graph| and score them against |truth|."""
    start = time.perf_counter()
    stage1 = inference.algo1(graph, c, d=spec_like.d,
                             K=spec_like.gmm_components,
                             K_range=spec_like.k_range, seed=seed)
    elapsed1 = time.perf_counter() - start

    ari_known = math.nan
    if beta_known is not None:
        known = inference.algo2(graph, Z, beta_known=beta_known,
                                d2=spec_like.second_dimension, seed=seed,
                                stage1=stage1, c=c)
        ari_known = cluster.ari(known.tau_tilde, truth)

    start = time.perf_counter()
    estimated = inference.algo2(graph, Z, method=spec_like.method,
                                d2=spec_like.second_dimension, seed=seed,
                                stage1=stage1, c=c)
    elapsed2 = elapsed1 + time.perf_counter() - start
    logger.info('algo1 took %.3fs, algo1+algo2 took %.3fs', elapsed1, elapsed2)
    return dict(beta_hat=estimated.beta_hat,
                ari_algo1=cluster.ari(stage1.tau_hat, truth),
                ari_algo2_known=ari_known,
                ari_algo2_est=cluster.ari(estimated.tau_tilde, truth),
                elapsed_algo1=elapsed1, elapsed_algo2=elapsed2)


def run_trial(spec, trial):
    """Simulate and analyse trial |trial| of |spec|."""
    try:
        labeled = sbm_model.sample(spec.build_model(), spec.n, spec.seed,
                                   balanced=spec.balanced, trial=trial)
        results = _analyse(labeled.graph, labeled.Z, labeled.tau, spec.c,
                           spec, trial_seed(spec.seed, trial), spec.beta)
    except (ValueError, ArithmeticError, AssertionError) as e:
        logger.warning('trial %d of %s failed: %s', trial, spec.name, e)
        return TrialRecord(trial=trial, error='%s: %s' %
                           (type(e).__name__, e))
    return TrialRecord(trial=trial, **results)


class ExperimentSummary(NamedTuple):
    """Per-trial records with mean and standard error of every column."""
    spec: Optional[ExperimentSpec]
    records: Tuple[TrialRecord, ...]
    means: dict
    stderrs: dict
    failures: int


def summarize(spec, records):
    """Aggregate |records|; stderr is the sample sd over sqrt(trials)."""
    means, stderrs = {}, {}
    for column in METRICS + TIMINGS:
        values = np.array([getattr(r, column) for r in records], dtype=float)
        values = values[~np.isnan(values)]
        means[column] = float(values.mean()) if values.size else math.nan
        stderrs[column] = (float(values.std(ddof=1) / math.sqrt(values.size))
                           if values.size > 1 else math.nan)
    failures = sum(1 for r in records if r.error)
    return ExperimentSummary(spec=spec, records=tuple(records), means=means,
                             stderrs=stderrs, failures=failures)


def run_experiment(spec, workers=None):
    """Run every trial of |spec| and summarize them.

    Trial i always draws from the stream keyed by (seed, i), so the worker
    count does not change any result.
    """
    spec.validate()
    if spec.seed is None:
        raise ExperimentError('a seed is required')
    workers = default_workers() if workers is None else max(1, workers)
    trials = range(spec.trials)
    logger.info('running %s: %d trials on %d workers', spec.name,
                spec.trials, workers)
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(workers) as executor:
            records = list(executor.map(run_trial, [spec] * spec.trials,
                                        trials))
    else:
        records = [run_trial(spec, trial) for trial in trials]
    summary = summarize(spec, records)
    if summary.failures == spec.trials:
        raise ExperimentError('all %d trials of %s failed; first error: %s' %
                              (spec.trials, spec.name, records[0].error))
    return summary


class _ObservedSettings(NamedTuple):
    d: Optional[int]
    d2: Optional[int]
    gmm_components: Optional[int]
    k_range: range
    method: str

    @property
    def second_dimension(self):
        return self.d2 if self.d2 is not None else self.d


def compare_on_graph(graph, Z, labels, d=None, d2=None, gmm_components=None,
                     k_max=None, method='WA', seed=0, c=None):
    """Score both pipelines on an observed graph against reference labels.

    |c| defaults to the number of levels observed in Z.
    """
    Z = np.asarray(Z)
    if c is None:
        c = np.unique(Z).size
    settings = _ObservedSettings(
        d=d, d2=d2, gmm_components=gmm_components,
        k_range=range(c, (k_max if k_max is not None else 4 * c) + 1),
        method=method)
    results = _analyse(graph, Z, np.asarray(labels), c, settings, seed, None)
    return TrialRecord(trial=0, **results)


def _format(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return '' if math.isnan(value) else '%.6g' % value
    return str(value)


def _write_csv(path, header, rows):
    try:
        with open(path, 'w', encoding='utf-8', newline='') as csv_file:
            writer = csv.writer(csv_file, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format(value) for value in row])
    except OSError as e:
        raise ExperimentError('cannot write %s: %s' % (path, e)) from e


def emit_table(summaries, path, include_timings=False):
    """Write one row per summary: parameters, then mean and stderr columns."""
    columns = METRICS + (TIMINGS if include_timings else ())
    header = list(PARAMETER_COLUMNS)
    for column in columns:
        header += ['%s_mean' % column, '%s_stderr' % column]
    header.append('failures')
    rows = []
    for summary in summaries:
        spec = summary.spec
        row = [getattr(spec, name) if spec is not None else None
               for name in PARAMETER_COLUMNS]
        if spec is not None:
            row[PARAMETER_COLUMNS.index('d2')] = spec.second_dimension
        for column in columns:
            row += [summary.means[column], summary.stderrs[column]]
        row.append(summary.failures)
        rows.append(row)
    _write_csv(path, header, rows)


def emit_records(summary, path, include_timings=False):
    """Write the per-trial records of |summary|."""
    columns = ('trial',) + METRICS + (TIMINGS if include_timings else
                                      ()) + ('error',)
    _write_csv(path, columns,
               ([getattr(r, column) for column in columns]
                for r in summary.records))


def emit_grid(grid, path):
    """Write a Chernoff grid as axis1,axis2,rho_star rows."""
    rows = ((x, y, grid.values[i, j]) for i, x in enumerate(grid.axis1)
            for j, y in enumerate(grid.axis2))
    _write_csv(path, [grid.axis1_name, grid.axis2_name, 'rho_star'],
               ([float(x), float(y), float(v)] for x, y, v in rows))
