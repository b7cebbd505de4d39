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
"""Unittests for the harness module."""

import csv
import json
import math
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np
from numpy import testing

import chernoff
import harness
import model

SMALL = harness.ExperimentSpec(name='small', family='rank_one', n=40,
                               trials=3, seed=1, p=0.5, q=0.7, beta=0.2, c=2,
                               d=3, d2=1, gmm_components=4)


def _read_csv(path):
    with open(path, newline='') as csv_file:
        return list(csv.reader(csv_file))


class ExperimentSpecTests(unittest.TestCase):
    """Tests for harness.ExperimentSpec."""

    def setUp(self):
        self.tempdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tempdir)

    def _write_json(self, filename, values):
        path = os.path.join(self.tempdir, filename)
        with open(path, 'w') as outf:
            json.dump(values, outf)
        return path

    def test_load(self):
        """Values load and the name defaults to the file stem."""
        path = self._write_json('table1_row1.json', {
            'family': 'rank_one', 'n': 100, 'trials': 100, 'p': 0.3,
            'q': 0.668, 'beta': 0.49, 'd': 3, 'quick_trials': 5})
        spec = harness.ExperimentSpec.load_from_json(path)
        self.assertEqual(spec.name, 'table1_row1')
        self.assertEqual(spec.quick().trials, 5)
        self.assertEqual(spec.second_dimension, 3)
        self.assertEqual(spec.k_range, range(2, 9))

    def test_unknown_key(self):
        """Misspelled keys are rejected."""
        path = self._write_json('bad.json', {'family': 'rank_one',
                                             'betta': 0.1})
        with self.assertRaisesRegex(harness.ExperimentError, 'betta'):
            harness.ExperimentSpec.load_from_json(path)

    def test_invalid_model(self):
        """Parameters outside the model domain are rejected."""
        with self.assertRaisesRegex(harness.ExperimentError, 'invalid model'):
            harness.ExperimentSpec(p=0.9, q=0.95, beta=0.3).validate()

    def test_method(self):
        """Only SA, WA and both are valid methods."""
        with self.assertRaises(harness.ExperimentError):
            SMALL._replace(method='known').validate()

    def test_overrides(self):
        """None overrides are ignored."""
        spec = SMALL.with_overrides(trials=None, seed=9)
        self.assertEqual((spec.trials, spec.seed), (3, 9))


class RunExperimentTests(unittest.TestCase):
    """Tests for harness.run_experiment."""

    def setUp(self):
        self.tempdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tempdir)

    def test_deterministic(self):
        """Equal seeds give equal records."""
        first = harness.run_experiment(SMALL, workers=1)
        second = harness.run_experiment(SMALL, workers=1)
        for column in harness.METRICS:
            testing.assert_array_equal(
                [getattr(r, column) for r in first.records],
                [getattr(r, column) for r in second.records])
        self.assertEqual(len(first.records), 3)

    def test_parallel_matches_serial(self):
        """The worker count does not change the table."""
        serial = os.path.join(self.tempdir, 'serial.csv')
        parallel = os.path.join(self.tempdir, 'parallel.csv')
        harness.emit_table([harness.run_experiment(SMALL, workers=1)], serial)
        harness.emit_table([harness.run_experiment(SMALL, workers=2)],
                           parallel)
        with open(serial, 'rb') as a, open(parallel, 'rb') as b:
            self.assertEqual(a.read(), b.read())

    def test_workers_from_environment(self):
        """SBMCOV_WORKERS sets the default worker count."""
        with mock.patch.dict(os.environ, {harness.WORKERS_ENV: '3'}):
            self.assertEqual(harness.default_workers(), 3)
        with mock.patch.dict(os.environ, {harness.WORKERS_ENV: 'many'}):
            with self.assertRaises(harness.ExperimentError):
                harness.default_workers()

    def test_seed_required(self):
        """Runs without a seed are refused."""
        with self.assertRaisesRegex(harness.ExperimentError, 'seed'):
            harness.run_experiment(SMALL._replace(seed=None))

    def test_all_trials_fail(self):
        """An impossible embedding dimension fails every trial."""
        with self.assertRaisesRegex(harness.ExperimentError, 'all 2 trials'):
            harness.run_experiment(SMALL._replace(d=100, trials=2))

    @unittest.skipUnless(os.environ.get('SBMCOV_SLOW'), 'slow sampled run')
    def test_config_run(self):
        """The n=260 rank-one row separates the blocks."""
        path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..',
                            'configs', 'rank_one_c2_n260_q668.json')
        spec = harness.ExperimentSpec.load_from_json(path).quick()
        summary = harness.run_experiment(spec._replace(seed=1))
        self.assertGreater(summary.means['ari_algo2_known'], 0.9)
        self.assertLess(abs(summary.means['beta_hat'] - 0.49), 0.05)

    def _config_summary(self, name, trials):
        path = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..',
                            'configs', name)
        spec = harness.ExperimentSpec.load_from_json(path)
        return harness.run_experiment(spec._replace(seed=1, trials=trials))

    @unittest.skipUnless(os.environ.get('SBMCOV_SLOW'), 'slow sampled run')
    def test_two_level_reference_row(self):
        """The n=100, q=0.668 rank-one row matches the reference ARIs."""
        summary = self._config_summary('rank_one_c2_n100_q668.json', 50)
        self.assertLess(abs(summary.means['ari_algo1'] - 0.858), 0.08)
        self.assertLess(abs(summary.means['ari_algo2_known'] - 0.951), 0.03)
        summary = self._config_summary('rank_one_c2_n260_q668.json', 50)
        for column in ('ari_algo1', 'ari_algo2_known', 'ari_algo2_est'):
            self.assertGreater(summary.means[column], 0.97)

    @unittest.skipUnless(os.environ.get('SBMCOV_SLOW'), 'slow sampled run')
    def test_five_level_rank_one_row(self):
        """The q=0.375, beta=0.4 row matches the reference values."""
        summary = self._config_summary('rank_one_c5_beta40_q375.json', 20)
        self.assertLess(abs(summary.means['ari_algo1'] - 0.283), 0.10)
        self.assertLess(abs(summary.means['ari_algo2_est'] - 0.763), 0.05)
        self.assertLess(abs(summary.means['beta_hat'] - 0.4), 0.01)

    @unittest.skipUnless(os.environ.get('SBMCOV_SLOW'), 'slow sampled run')
    def test_five_level_homogeneous_row(self):
        """Only the adjusted pipeline separates the a=0.135 blocks."""
        summary = self._config_summary('homogeneous_c5_beta20_a135.json', 20)
        self.assertLessEqual(summary.means['ari_algo1'], 0.15)
        self.assertLess(abs(summary.means['ari_algo2_est'] - 0.893), 0.05)
        self.assertLess(abs(summary.means['beta_hat'] - 0.2), 0.01)

    def test_trial_seed(self):
        """Trial seeds depend on the trial index."""
        self.assertEqual(harness.trial_seed(1, 0), harness.trial_seed(1, 0))
        self.assertNotEqual(harness.trial_seed(1, 0), harness.trial_seed(1, 1))


class SummarizeTests(unittest.TestCase):
    """Tests for harness.summarize."""

    def test_stderr(self):
        """Standard error is the sample sd over sqrt(count)."""
        records = [harness.TrialRecord(trial=i, beta_hat=v)
                   for i, v in enumerate((1.0, 2.0, 3.0))]
        records.append(harness.TrialRecord(trial=3, error='ValueError: x'))
        summary = harness.summarize(SMALL, records)
        self.assertAlmostEqual(summary.means['beta_hat'], 2.0)
        self.assertAlmostEqual(summary.stderrs['beta_hat'], 1 / math.sqrt(3))
        self.assertEqual(summary.failures, 1)
        self.assertTrue(math.isnan(summary.means['ari_algo1']))

    def test_single_value(self):
        """One value has no standard error."""
        summary = harness.summarize(
            SMALL, [harness.TrialRecord(trial=0, beta_hat=0.5)])
        self.assertTrue(math.isnan(summary.stderrs['beta_hat']))


class EmitTests(unittest.TestCase):
    """Tests for the CSV writers."""

    def setUp(self):
        self.tempdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tempdir)

    def test_table(self):
        """Rows echo the parameters and hold mean and stderr columns."""
        records = [harness.TrialRecord(trial=0, beta_hat=0.123456789,
                                       ari_algo1=1.0)]
        path = os.path.join(self.tempdir, 'table.csv')
        harness.emit_table([harness.summarize(SMALL, records)], path)
        header, row = _read_csv(path)
        self.assertEqual(header[:len(harness.PARAMETER_COLUMNS)],
                         list(harness.PARAMETER_COLUMNS))
        self.assertIn('beta_hat_mean', header)
        self.assertNotIn('elapsed_algo1_mean', header)
        values = dict(zip(header, row))
        self.assertEqual(values['name'], 'small')
        self.assertEqual(values['d2'], '1')
        self.assertEqual(values['beta_hat_mean'], '0.123457')
        self.assertEqual(values['beta_hat_stderr'], '')
        self.assertEqual(values['balanced'], 'true')

    def test_timings(self):
        """Timing columns appear on request."""
        path = os.path.join(self.tempdir, 'table.csv')
        harness.emit_table([harness.summarize(SMALL, [])], path,
                           include_timings=True)
        self.assertIn('elapsed_algo2_stderr', _read_csv(path)[0])

    def test_records(self):
        """Per-trial rows carry their error text."""
        summary = harness.summarize(SMALL, [
            harness.TrialRecord(trial=0, beta_hat=0.2),
            harness.TrialRecord(trial=1, error='InferenceError: empty')])
        path = os.path.join(self.tempdir, 'records.csv')
        harness.emit_records(summary, path)
        rows = _read_csv(path)
        self.assertEqual(rows[0][0], 'trial')
        self.assertEqual(rows[2][-1], 'InferenceError: empty')

    def test_grid(self):
        """Grid files have the axis names and leave missing cells empty."""
        grid = chernoff.ChernoffGrid('a', 'beta', np.array([0.1, 0.3]),
                                     np.array([0.2]),
                                     np.array([[np.nan], [0.5]]))
        path = os.path.join(self.tempdir, 'grid.csv')
        harness.emit_grid(grid, path)
        self.assertEqual(_read_csv(path), [['a', 'beta', 'rho_star'],
                                           ['0.1', '0.2', ''],
                                           ['0.3', '0.2', '0.5']])

    def test_unwritable(self):
        """Write failures surface as ExperimentError."""
        with self.assertRaises(harness.ExperimentError):
            harness.emit_table([], os.path.join(self.tempdir, 'no', 'x.csv'))


class CompareOnGraphTests(unittest.TestCase):
    """Tests for harness.compare_on_graph."""

    def test_scores(self):
        """Both pipelines are scored against the reference labels."""
        labeled = model.sample(SMALL.build_model(), 40, seed=2)
        record = harness.compare_on_graph(labeled.graph, labeled.Z,
                                          labeled.tau, d=3, d2=1,
                                          gmm_components=4)
        self.assertTrue(-1 <= record.ari_algo1 <= 1)
        self.assertTrue(-1 <= record.ari_algo2_est <= 1)
        self.assertTrue(math.isnan(record.ari_algo2_known))

    def test_declared_levels(self):
        """An explicit c sets the BIC range and is passed to algo2."""
        labeled = model.sample(SMALL.build_model(), 40, seed=2)
        with mock.patch.object(harness.inference, 'algo2',
                               wraps=harness.inference.algo2) as algo2:
            record = harness.compare_on_graph(labeled.graph, labeled.Z,
                                              labeled.tau, d=3, d2=1,
                                              gmm_components=6, c=3)
        self.assertTrue(-1 <= record.ari_algo2_est <= 1)
        self.assertEqual([call.kwargs['c'] for call in algo2.call_args_list],
                         [3])

    def test_trial_passes_levels(self):
        """Simulated trials hand the model's c to algo2."""
        with mock.patch.object(harness.inference, 'algo2',
                               wraps=harness.inference.algo2) as algo2:
            record = harness.run_trial(SMALL, 0)
        self.assertEqual(record.error, '')
        self.assertEqual([call.kwargs['c'] for call in algo2.call_args_list],
                         [2, 2])


if __name__ == '__main__':
    unittest.main()
