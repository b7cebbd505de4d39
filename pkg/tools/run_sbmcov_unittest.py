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
"""Unittests for the sbmcov command line."""

import contextlib
import csv
import io
import json
import os
import shutil
import tempfile
import unittest

import run_sbmcov


def _run(argv):
    """Run main and return (exit code, stdout)."""
    stdout, stderr = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(
            stderr):
        code = run_sbmcov.main(argv)
    return code, stdout.getvalue() + stderr.getvalue()


class RunSbmcovTests(unittest.TestCase):
    """Tests for run_sbmcov.main."""

    def setUp(self):
        self.tempdir = tempfile.mkdtemp()
        self.edges = os.path.join(self.tempdir, 'edges.csv')
        self.labels = os.path.join(self.tempdir, 'labels.csv')

    def tearDown(self):
        shutil.rmtree(self.tempdir)

    def _path(self, filename):
        return os.path.join(self.tempdir, filename)

    def _simulate(self):
        code, output = _run([
            'simulate', '--family', 'rank_one', '--p', '0.5', '--q', '0.7',
            '--beta', '0.2', '--n', '40', '--seed', '3', '--edges',
            self.edges, '--labels', self.labels
        ])
        self.assertEqual(code, 0, output)

    def test_simulate(self):
        """simulate writes an edge list and a label table."""
        self._simulate()
        with open(self.labels, newline='') as label_file:
            rows = list(csv.reader(label_file))
        self.assertEqual(rows[0], ['vertex', 'tau', 'xi', 'Z'])
        self.assertEqual(len(rows), 41)

    def test_algo1_and_algo2(self):
        """Both pipelines run on simulated files and write labels."""
        self._simulate()
        graph_args = ['--edges', self.edges, '--covariates', self.labels,
                      '--labels', self.labels, '--d', '3',
                      '--gmm-components', '4']
        output_path = self._path('tau.csv')
        code, output = _run(['algo1'] + graph_args +
                            ['--output', output_path])
        self.assertEqual(code, 0, output)
        self.assertIn('ari=', output)
        with open(output_path, newline='') as label_file:
            self.assertEqual(next(csv.reader(label_file)), ['vertex', 'tau'])

        code, output = _run(['algo2'] + graph_args +
                            ['--d2', '1', '--method', 'both'])
        self.assertEqual(code, 0, output)
        self.assertIn('beta_hat=', output)

        code, output = _run(['algo2'] + graph_args +
                            ['--d2', '1', '--beta', '0.2'])
        self.assertEqual(code, 0, output)
        self.assertIn('method=known', output)

    def _config(self, **values):
        path = self._path('config.json')
        with open(path, 'w') as outf:
            json.dump(values, outf)
        return path

    def test_algo_config(self):
        """Pipeline settings come from --config; flags override them."""
        self._simulate()
        config = self._config(family='rank_one', p=0.5, q=0.7, beta=0.2,
                              d=3, d2=1, gmm_components=6)
        graph_args = ['--edges', self.edges, '--covariates', self.labels,
                      '--config', config]
        code, output = _run(['algo1'] + graph_args)
        self.assertEqual(code, 0, output)
        self.assertIn('d_hat=3 K_hat=6 ', output)

        code, output = _run(['algo1'] + graph_args +
                            ['--gmm-components', '4'])
        self.assertEqual(code, 0, output)
        self.assertIn('K_hat=4 ', output)

        code, output = _run(['algo2'] + graph_args +
                            ['--gmm-components', '4', '--beta', '0.2'])
        self.assertEqual(code, 0, output)
        self.assertIn('d_tilde=1 ', output)

    def test_algo_levels(self):
        """--c larger than the observed level count is flagged."""
        self._simulate()
        code, output = _run(['algo1', '--edges', self.edges, '--covariates',
                             self.labels, '--d', '3', '--gmm-components',
                             '4', '--c', '3'])
        self.assertEqual(code, 0, output)
        self.assertIn('k_not_divisible', output)

    def test_chernoff_config(self):
        """chernoff reads the model from --config."""
        config = self._config(family='homogeneous', a=0.3, b=0.1, beta=0.1,
                              K=2)
        code, output = _run(['chernoff', '--config', config, '--K', '4'])
        self.assertEqual(code, 0, output)
        self.assertIn('rho_star=0.5 ', output)

    def test_chernoff_needs_model(self):
        """Without --config the family and beta are required."""
        with self.assertRaises(SystemExit) as cm:
            _run(['chernoff', '--p', '0.3', '--q', '0.6'])
        self.assertEqual(cm.exception.code, 2)

    def test_grid_config(self):
        """grid takes the family and fixed values from --config."""
        config = self._config(family='rank_one', p=0.3, q=0.6, beta=0.1)
        path = self._path('grid.csv')
        code, output = _run(['grid', '--config', config, '--axis1', '0.4',
                             '0.6', '--axis2', '0.1', '0.2', '--resolution',
                             '2', '--workers', '1', '--output', path])
        self.assertEqual(code, 0, output)
        with open(path, newline='') as grid_file:
            rows = list(csv.reader(grid_file))
        self.assertEqual(rows[0], ['q', 'beta', 'rho_star'])
        self.assertEqual(len(rows), 5)

    def test_missing_file(self):
        """Unreadable inputs exit with status 1."""
        code, output = _run(['algo1', '--edges', self._path('nope.csv'),
                             '--covariates', self._path('nope.csv')])
        self.assertEqual(code, 1)
        self.assertIn('sbmcov: error:', output)

    def test_chernoff(self):
        """chernoff prints the ratio."""
        code, output = _run(['chernoff', '--family', 'homogeneous', '--a',
                             '0.3', '--b', '0.1', '--beta', '0.1', '--K', '4'])
        self.assertEqual(code, 0, output)
        self.assertIn('rho_star=0.5 ', output)

    def test_chernoff_missing_parameter(self):
        """rank_one needs both p and q."""
        with self.assertRaises(SystemExit) as cm:
            _run(['chernoff', '--family', 'rank_one', '--p', '0.3', '--beta',
                  '0.1'])
        self.assertEqual(cm.exception.code, 2)

    def test_grid(self):
        """grid writes one row per cell."""
        path = self._path('grid.csv')
        code, output = _run(['grid', '--family', 'homogeneous', '--axis1',
                             '0.1', '0.5', '--axis2', '0.1', '0.5',
                             '--resolution', '3', '--workers', '1',
                             '--output', path])
        self.assertEqual(code, 0, output)
        with open(path, newline='') as grid_file:
            rows = list(csv.reader(grid_file))
        self.assertEqual(rows[0], ['a', 'beta', 'rho_star'])
        self.assertEqual(len(rows), 10)

    def test_experiment_needs_seed(self):
        """experiment refuses to run without --seed."""
        with self.assertRaises(SystemExit) as cm:
            _run(['experiment', 'table.json', '--output', self._path('t.csv')])
        self.assertEqual(cm.exception.code, 2)

    def test_experiment(self):
        """experiment runs a config and writes the table and records."""
        config = self._path('small.json')
        with open(config, 'w') as outf:
            json.dump({'family': 'rank_one', 'n': 40, 'trials': 10,
                       'quick_trials': 2, 'p': 0.5, 'q': 0.7, 'beta': 0.2,
                       'd': 3, 'd2': 1, 'gmm_components': 4}, outf)
        table = self._path('table.csv')
        records = self._path('records')
        code, output = _run(['experiment', config, '--seed', '5', '--quick',
                             '--workers', '1', '--output', table,
                             '--records-dir', records])
        self.assertEqual(code, 0, output)
        with open(table, newline='') as table_file:
            rows = list(csv.DictReader(table_file))
        self.assertEqual(rows[0]['name'], 'small')
        self.assertEqual(rows[0]['trials'], '2')
        self.assertTrue(os.path.exists(os.path.join(records, 'small.csv')))

    def test_experiment_observed(self):
        """experiment --labels scores an observed graph."""
        self._simulate()
        table = self._path('observed.csv')
        code, output = _run(['experiment', '--seed', '0', '--edges',
                             self.edges, '--covariates', self.labels,
                             '--labels', self.labels, '--d', '3', '--d2', '1',
                             '--gmm-components', '4', '--output', table])
        self.assertEqual(code, 0, output)
        self.assertIn('ari_algo1=', output)

    def test_ingest(self):
        """ingest renumbers vertices and codes covariates."""
        edges = self._path('raw.txt')
        covariates = self._path('raw_cov.csv')
        with open(edges, 'w') as outf:
            outf.write('10 2\n2 7\n7 7\n')
        with open(covariates, 'w') as outf:
            outf.write('vertex,dorm\n2,east\n7,west\n10,east\n')
        out_dir = self._path('out')
        code, output = _run(['ingest', '--edges', edges, '--covariates',
                             covariates, '--column', 'dorm', '--output-dir',
                             out_dir])
        self.assertEqual(code, 0, output)
        self.assertIn('1 self-loops', output)
        self.assertIn('vertex ids renumbered', output)
        with open(os.path.join(out_dir, 'covariates.csv'),
                  newline='') as cov_file:
            self.assertEqual(list(csv.reader(cov_file)),
                             [['vertex', 'dorm'], ['0', '1'], ['1', '2'],
                              ['2', '1']])
        with open(os.path.join(out_dir, 'edges.csv')) as edge_file:
            self.assertEqual(edge_file.read(), '# vertices=3\n0,1\n0,2\n')


if __name__ == '__main__':
    unittest.main()
