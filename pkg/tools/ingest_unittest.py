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
"""Unittests for the ingest module."""

import os
import shutil
import tempfile
import unittest

import numpy as np
from numpy import testing

import ingest
import model


class _TempDirTestCase(unittest.TestCase):

    def setUp(self):
        self.tempdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tempdir)

    def _write_file(self, filename, contents):
        """Helper to write out a file for testing."""
        path = os.path.join(self.tempdir, filename)
        with open(path, 'w') as outf:
            outf.write(contents)
        return path


class LoadGraphTests(_TempDirTestCase):
    """Tests for ingest.load_graph."""

    def test_path_graph(self):
        """A three-vertex path keeps its ids."""
        path = self._write_file('edges.csv', '0,1\n1,2\n')
        ingested = ingest.load_graph(path)
        testing.assert_array_equal(ingested.graph.A,
                                   [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
        self.assertFalse(ingested.remapped)
        self.assertEqual(ingested.graph.edges(), [(0, 1), (1, 2)])

    def test_duplicates_and_loops(self):
        """Repeated edges collapse and self-loops are dropped."""
        path = self._write_file('edges.csv',
                                '0,1\n1,0\n0,1\n2,2\n1,2\n')
        ingested = ingest.load_graph(path)
        self.assertEqual(ingested.duplicates, 2)
        self.assertEqual(ingested.self_loops, 1)
        self.assertEqual(ingested.graph.A.sum(), 4)
        testing.assert_array_equal(np.diag(ingested.graph.A), np.zeros(3))

    def test_separators(self):
        """Whitespace, tabs and comments are accepted."""
        path = self._write_file('edges.txt',
                                '# header\n0 1\n1\t2  # trailing\n\n')
        self.assertEqual(ingest.load_graph(path).graph.edges(),
                         [(0, 1), (1, 2)])

    def test_malformed(self):
        """Errors name the file and line."""
        path = self._write_file('edges.txt', '0,1\n1 2 3\n')
        with self.assertRaisesRegex(ingest.ParseException,
                                    r'edges\.txt\(2\): expected'):
            ingest.load_graph(path)

    def test_empty(self):
        """A file without edges is an error."""
        path = self._write_file('edges.txt', '# nothing\n')
        with self.assertRaises(ingest.ParseException):
            ingest.load_graph(path)

    def test_remapped_ids(self):
        """Sparse integer ids are renumbered in numeric order."""
        path = self._write_file('edges.csv', '10,2\n2,7\n')
        ingested = ingest.load_graph(path)
        self.assertTrue(ingested.remapped)
        self.assertEqual(ingested.vertex_ids, ('2', '7', '10'))
        self.assertEqual(ingested.graph.edges(), [(0, 1), (0, 2)])

    def test_string_ids(self):
        """Non-numeric ids sort lexicographically."""
        path = self._write_file('edges.csv', 'bob,alice\ncarol,bob\n')
        self.assertEqual(ingest.load_graph(path).vertex_ids,
                         ('alice', 'bob', 'carol'))

    def test_write_round_trip(self):
        """A written edge list reads back to the same graph."""
        labeled = model.sample(model.rank_one_model(0.3, 0.6, 0.1), 20,
                               seed=5)
        path = os.path.join(self.tempdir, 'out.csv')
        ingest.write_edge_list(labeled.graph, path)
        testing.assert_array_equal(ingest.load_graph(path).graph.A,
                                   labeled.graph.A)

    def test_isolated_vertices(self):
        """The vertex count keeps vertices that have no edges."""
        graph = model.Graph.from_adjacency(np.array([[0, 1, 0, 0],
                                                     [1, 0, 0, 0],
                                                     [0, 0, 0, 0],
                                                     [0, 0, 0, 0]]))
        path = os.path.join(self.tempdir, 'out.csv')
        ingest.write_edge_list(graph, path)
        ingested = ingest.load_graph(path)
        self.assertEqual(ingested.graph.n, 4)
        self.assertEqual(ingested.vertex_ids, ('0', '1', '2', '3'))
        self.assertFalse(ingested.remapped)
        testing.assert_array_equal(ingested.graph.A, graph.A)

    def test_vertex_count_without_edges(self):
        """An edgeless graph round-trips through its vertex count."""
        path = os.path.join(self.tempdir, 'empty.csv')
        ingest.write_edge_list(model.Graph.from_adjacency(np.zeros((3, 3))),
                               path)
        ingested = ingest.load_graph(path)
        self.assertEqual(ingested.graph.n, 3)
        self.assertEqual(ingested.graph.edges(), [])

    def test_vertex_count_too_small(self):
        """Ids beyond the declared vertex count are rejected."""
        path = self._write_file('edges.csv', '# vertices=2\n0,1\n1,5\n')
        with self.assertRaisesRegex(ingest.ParseException, 'outside 0..1'):
            ingest.load_graph(path)


class LoadCovariatesTests(_TempDirTestCase):
    """Tests for ingest.load_covariates."""

    def test_thresholds(self):
        """Numeric values are binned by the thresholds."""
        path = self._write_file(
            'cov.csv', 'vertex,rank\n0,100\n1,200\n2,1000\n3,150\n')
        column = ingest.load_covariates(path, 'rank',
                                        thresholds=(150, 250, 900))
        testing.assert_array_equal(column.levels, [1, 2, 4, 2])
        self.assertEqual(column.c, 4)
        self.assertEqual(column.dictionary[1], '<150')
        self.assertEqual(column.dictionary[4], '>=900')

    def test_categories(self):
        """Categories are coded in sorted order."""
        path = self._write_file('cov.csv',
                                'vertex,school\n0,north\n1,east\n2,north\n')
        column = ingest.load_covariates(path, 'school')
        testing.assert_array_equal(column.levels, [2, 1, 2])
        self.assertEqual(column.dictionary, {1: 'east', 2: 'north'})

    def test_vertex_ids(self):
        """Rows follow the order of the supplied vertex ids."""
        path = self._write_file('cov.csv', 'vertex,g\n10,b\n2,a\n7,b\n')
        column = ingest.load_covariates(path, 'g',
                                        vertex_ids=('2', '7', '10'))
        testing.assert_array_equal(column.levels, [1, 2, 2])

    def test_missing_vertex(self):
        """Every vertex needs a row."""
        path = self._write_file('cov.csv', 'vertex,g\n0,a\n')
        with self.assertRaisesRegex(ingest.ParseException, 'no covariate'):
            ingest.load_covariates(path, 'g', vertex_ids=('0', '1'))

    def test_unknown_vertex(self):
        """Rows for vertices outside the graph are rejected."""
        path = self._write_file('cov.csv', 'vertex,g\n0,a\n5,b\n')
        with self.assertRaisesRegex(ingest.ParseException, 'unknown'):
            ingest.load_covariates(path, 'g', vertex_ids=('0',))

    def test_missing_column(self):
        """The requested column must exist."""
        path = self._write_file('cov.csv', 'vertex,g\n0,a\n')
        with self.assertRaisesRegex(ingest.ParseException, 'missing column'):
            ingest.load_covariates(path, 'h')

    def test_non_numeric(self):
        """Thresholds need numeric values."""
        path = self._write_file('cov.csv', 'vertex,g\n0,a\n')
        with self.assertRaises(ingest.ParseException):
            ingest.load_covariates(path, 'g', thresholds=(1,))


if __name__ == '__main__':
    unittest.main()
