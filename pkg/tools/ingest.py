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
"""Readers and writers for edge lists and vertex covariate tables."""

import csv
import logging
import re
from typing import Dict, NamedTuple, Tuple

import numpy as np
from scipy import sparse

try:
    import model as sbm_model
except ImportError:
    from sbmcov import model as sbm_model

logger = logging.getLogger(__name__)

VERTEX_COLUMN = 'vertex'
VERTEX_COUNT_RE = re.compile(r'^#\s*vertices\s*=\s*(\d+)\s*$')


class ParseException(Exception):
    """An exception that is raised when an input file is malformed."""

    def __init__(self, message, filename, *, line='', line_number=0):
        if line_number:
            message = '%s(%d): %s' % (filename, line_number, message)
        else:
            message = '%s: %s' % (filename, message)
        if line:
            message += '\n    %s' % line
        super().__init__(message)


class ReaderState:
    """Tracks the current file position for diagnostics."""

    def __init__(self, filename):
        self._filename = str(filename)
        self._line = ''
        self._line_number = 0
        self.vertex_count = None

    @property
    def filename(self):
        """Return the name of the file being processed."""
        return self._filename

    def error(self, message):
        """Raise a ParseException at the current line."""
        raise ParseException(message, self._filename, line=self._line,
                             line_number=self._line_number)

    def lines(self, stream):
        """Yield stripped lines, skipping blanks and comments."""
        for line_number, line in enumerate(stream, start=1):
            self._line = line.rstrip('\n')
            self._line_number = line_number
            match = VERTEX_COUNT_RE.match(line.strip())
            if match:
                self.vertex_count = int(match.group(1))
            stripped = line.split('#', 1)[0].strip()
            if stripped:
                yield stripped


def _split_pair(state, line):
    """Split |line| on a comma if present, otherwise on whitespace."""
    fields = [field.strip() for field in line.split(',')] if ',' in line \
        else line.split()
    if len(fields) != 2 or not all(fields):
        state.error('expected "src<sep>dst", got %d fields' % len(fields))
    return fields


def _vertex_order(ids):
    """Return original ids in vertex order.

    Ids already equal to 0..n-1 keep their value; otherwise integer ids sort
    numerically and anything else lexicographically.
    """
    try:
        numeric = sorted(set(ids), key=int)
    except ValueError:
        return sorted(set(ids))
    return numeric


class IngestedGraph(NamedTuple):
    """A graph read from disk and how its vertices were renamed."""
    graph: sbm_model.Graph
    vertex_ids: Tuple[str, ...]
    duplicates: int
    self_loops: int

    @property
    def remapped(self):
        """Whether vertex indices differ from the original ids."""
        return any(original != str(index) for index, original in
                   enumerate(self.vertex_ids))


def load_graph(path):
    """Read an undirected simple graph from an edge list.

    A '# vertices=N' comment fixes the vertex set to 0..N-1 so that isolated
    vertices survive; otherwise the vertices are the ids that occur in edges.
    """
    state = ReaderState(path)
    pairs = []
    with open(path, 'r', encoding='utf-8') as edge_file:
        for line in state.lines(edge_file):
            pairs.append(tuple(_split_pair(state, line)))
    if state.vertex_count is not None:
        vertex_ids = tuple(str(i) for i in range(state.vertex_count))
        outside = sorted(set(v for pair in pairs for v in pair) -
                         set(vertex_ids))
        if outside:
            raise ParseException(
                'vertex ids outside 0..%d: %s' %
                (state.vertex_count - 1, ', '.join(outside[:5])), str(path))
    elif pairs:
        vertex_ids = tuple(_vertex_order([v for pair in pairs for v in pair]))
    else:
        raise ParseException('no edges found', str(path))
    index = {original: i for i, original in enumerate(vertex_ids)}
    self_loops = 0
    edges = set()
    for src, dst in pairs:
        if src == dst:
            self_loops += 1
            continue
        i, j = index[src], index[dst]
        edges.add((min(i, j), max(i, j)))
    duplicates = len(pairs) - self_loops - len(edges)
    if self_loops:
        logger.warning('%s: dropped %d self-loops', path, self_loops)
    if duplicates:
        logger.warning('%s: collapsed %d duplicate edges', path, duplicates)

    n = len(vertex_ids)
    rows = np.array([i for i, _ in edges], dtype=int)
    cols = np.array([j for _, j in edges], dtype=int)
    upper = sparse.coo_matrix((np.ones(len(edges)), (rows, cols)),
                              shape=(n, n))
    A = (upper + upper.T).toarray()
    return IngestedGraph(graph=sbm_model.Graph(n=n, A=A),
                         vertex_ids=vertex_ids, duplicates=duplicates,
                         self_loops=self_loops)


class CovariateColumn(NamedTuple):
    """Covariate levels coded 1..c and what each code stands for."""
    levels: np.ndarray
    dictionary: Dict[int, str]

    @property
    def c(self):
        """Number of distinct levels."""
        return len(self.dictionary)


def _bin_labels(thresholds):
    edges = ['%g' % t for t in thresholds]
    labels = ['<%s' % edges[0]]
    labels += ['[%s,%s)' % pair for pair in zip(edges, edges[1:])]
    labels.append('>=%s' % edges[-1])
    return {code: label for code, label in enumerate(labels, start=1)}


def load_covariates(path, column, vertex_ids=None, thresholds=None):
    """Read one covariate column keyed by the 'vertex' column.

    |vertex_ids| lists original ids in vertex order (see IngestedGraph);
    without it the vertex column must hold 0..n-1. With |thresholds| the
    numeric value v falls in level 1 + #{t <= v}.
    """
    state = ReaderState(path)
    values = {}
    with open(path, 'r', encoding='utf-8', newline='') as csv_file:
        reader = csv.DictReader(csv_file)
        fields = reader.fieldnames or []
        for required in (VERTEX_COLUMN, column):
            if required not in fields:
                raise ParseException('missing column %r' % required,
                                     str(path))
        for line_number, row in enumerate(reader, start=2):
            vertex = (row[VERTEX_COLUMN] or '').strip()
            if vertex in values:
                raise ParseException('duplicate row for vertex %s' % vertex,
                                     str(path), line_number=line_number)
            values[vertex] = (row[column] or '').strip()

    if vertex_ids is None:
        vertex_ids = tuple(str(i) for i in range(len(values)))
    unknown = sorted(set(values) - set(vertex_ids))
    if unknown:
        raise ParseException('unknown vertex ids: %s' % ', '.join(unknown[:5]),
                             state.filename)
    raw = []
    for original in vertex_ids:
        if original not in values:
            raise ParseException('no covariate row for vertex %s' % original,
                                 state.filename)
        raw.append(values[original])

    if thresholds:
        thresholds = np.asarray(sorted(thresholds), dtype=float)
        try:
            numeric = np.array([float(value) for value in raw])
        except ValueError as e:
            raise ParseException('non-numeric value in column %r' % column,
                                 state.filename) from e
        levels = np.searchsorted(thresholds, numeric, side='right') + 1
        dictionary = _bin_labels(thresholds)
    else:
        categories = sorted(set(raw))
        code = {category: i for i, category in enumerate(categories, start=1)}
        levels = np.array([code[value] for value in raw])
        dictionary = {i: category for category, i in code.items()}
    return CovariateColumn(levels=levels, dictionary=dictionary)


def write_edge_list(graph, path):
    """Write a vertex count and the edges of |graph| as 'i,j' lines, i < j."""
    with open(path, 'w', encoding='utf-8') as edge_file:
        edge_file.write('# vertices=%d\n' % graph.n)
        for i, j in graph.edges():
            edge_file.write('%d,%d\n' % (i, j))


def write_rows(path, header, rows):
    """Write a header and rows as CSV."""
    with open(path, 'w', encoding='utf-8', newline='') as csv_file:
        writer = csv.writer(csv_file)
        writer.writerow(header)
        writer.writerows(rows)


def write_id_map(vertex_ids, path):
    """Write the original id of every vertex index."""
    write_rows(path, ['vertex', 'original_id'], enumerate(vertex_ids))
