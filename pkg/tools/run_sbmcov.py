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
"""Community detection in blockmodels with a vertex covariate.

Simulate graphs, recover induced blocks with or without the covariate,
compute Chernoff ratios and run Monte-Carlo experiments.
"""

import argparse
import logging
import os
import sys

import numpy as np

try:
    import chernoff
    import cluster
    import harness
    import inference
    import ingest
    import model as sbm_model
except ImportError:
    from sbmcov import chernoff
    from sbmcov import cluster
    from sbmcov import harness
    from sbmcov import inference
    from sbmcov import ingest
    from sbmcov import model as sbm_model

_ERRORS = (sbm_model.ModelError, inference.InferenceError,
           cluster.ClusteringError, chernoff.ChernoffError,
           harness.ExperimentError, ingest.ParseException, ValueError,
           OSError)

SEED_REQUIRED_MSG = """experiment needs --seed so that runs are reproducible."""


def _add_model_args(parser):
    group = parser.add_argument_group('model')
    group.add_argument('--config', help='JSON experiment file with defaults')
    group.add_argument('--family', choices=harness.FAMILIES)
    for name in ('p', 'q', 'a', 'b', 'beta'):
        group.add_argument('--%s' % name, type=float)
    group.add_argument('--K', type=int, help='induced blocks (homogeneous)')
    group.add_argument('--c', type=int, help='covariate levels')
    group.add_argument('--n', type=int, help='vertices')
    group.add_argument('--unbalanced', action='store_true',
                       help='draw labels i.i.d. instead of exact counts')


def _add_pipeline_args(parser):
    group = parser.add_argument_group('pipeline')
    group.add_argument('--d', type=int, help='embedding dimension')
    group.add_argument('--d2', type=int,
                       help='embedding dimension after adjustment')
    group.add_argument('--gmm-components', type=int,
                       help='fix the number of expanded blocks')
    group.add_argument('--k-max', type=int,
                       help='largest expanded block count tried by BIC')
    group.add_argument('--method', choices=('SA', 'WA', 'both'))


def _add_graph_args(parser, required=True):
    group = parser.add_argument_group('observed graph')
    group.add_argument('--edges', required=required, help='edge list file')
    group.add_argument('--covariates', required=required,
                       help='CSV with a vertex column and covariates')
    group.add_argument('--column', default='Z', help='covariate column')
    group.add_argument('--thresholds', type=float, nargs='+',
                       help='bin a numeric covariate at these values')
    group.add_argument('--labels', help='CSV with reference labels')
    group.add_argument('--label-column', default='tau',
                       help='reference label column')


def parse_args(argv):
    """Return the parsed args."""
    arg_parser = argparse.ArgumentParser(description=__doc__)
    arg_parser.add_argument('--verbose', action='store_true',
                            help='log progress to stderr')
    subparsers = arg_parser.add_subparsers(dest='command', required=True)

    simulate = subparsers.add_parser('simulate', help='sample a graph')
    _add_model_args(simulate)
    simulate.add_argument('--seed', type=int, required=True)
    simulate.add_argument('--edges', required=True, help='output edge list')
    simulate.add_argument('--labels', required=True,
                          help='output CSV of vertex,tau,xi,Z')

    for name in ('algo1', 'algo2'):
        command = subparsers.add_parser(
            name, help='recover induced blocks %s the covariate' %
            ('ignoring' if name == 'algo1' else 'using'))
        _add_graph_args(command)
        _add_pipeline_args(command)
        command.add_argument('--config',
                             help='JSON experiment file with defaults')
        command.add_argument('--c', type=int,
                             help='covariate levels in the model')
        command.add_argument('--seed', type=int, default=0)
        command.add_argument('--output', help='output CSV of vertex labels')
        if name == 'algo2':
            command.add_argument('--beta', type=float,
                                 help='known covariate effect size')
            command.add_argument('--reselect-bic', action='store_true',
                                 help='pick the induced block count by BIC')

    chernoff_parser = subparsers.add_parser('chernoff',
                                            help='Chernoff ratio of a model')
    chernoff_parser.add_argument('--config',
                                 help='JSON experiment file with defaults')
    chernoff_parser.add_argument('--family', choices=harness.FAMILIES)
    for name in ('p', 'q', 'a', 'b'):
        chernoff_parser.add_argument('--%s' % name, type=float)
    chernoff_parser.add_argument('--beta', type=float)
    chernoff_parser.add_argument('--K', type=int)

    grid = subparsers.add_parser('grid', help='Chernoff ratio over a grid')
    grid.add_argument('--config', help='JSON experiment file with defaults')
    grid.add_argument('--family',
                      choices=('rank_one', 'homogeneous', 'homogeneous_k4'))
    grid.add_argument('--p', type=float, help='fixed p (default 0.3)')
    grid.add_argument('--b', type=float, help='fixed b (default 0.1)')
    grid.add_argument('--K', type=int, help='induced blocks (default 2)')
    grid.add_argument('--axis1', type=float, nargs=2, required=True,
                      metavar=('LO', 'HI'))
    grid.add_argument('--axis2', type=float, nargs=2, required=True,
                      metavar=('LO', 'HI'))
    grid.add_argument('--resolution', type=int, default=41)
    grid.add_argument('--workers', type=int)
    grid.add_argument('--output', required=True)

    experiment = subparsers.add_parser('experiment',
                                       help='run Monte-Carlo experiments')
    experiment.add_argument('configs', nargs='*',
                            help='JSON experiment files')
    experiment.add_argument('--seed', type=int)
    experiment.add_argument('--trials', type=int)
    experiment.add_argument('--quick', action='store_true',
                            help='use each config\'s quick_trials')
    experiment.add_argument('--workers', type=int)
    experiment.add_argument('--output', required=True, help='table CSV')
    experiment.add_argument('--records-dir',
                            help='directory for per-trial CSVs')
    experiment.add_argument('--timings', action='store_true',
                            help='include elapsed-time columns')
    _add_graph_args(experiment, required=False)
    _add_pipeline_args(experiment)

    ingest_parser = subparsers.add_parser('ingest',
                                          help='normalize a real graph')
    ingest_parser.add_argument('--edges', required=True)
    ingest_parser.add_argument('--covariates')
    ingest_parser.add_argument('--column', default='Z')
    ingest_parser.add_argument('--thresholds', type=float, nargs='+')
    ingest_parser.add_argument('--output-dir', required=True)

    return arg_parser.parse_args(argv), arg_parser


def _spec_from_opts(opts):
    spec = (harness.ExperimentSpec.load_from_json(opts.config)
            if opts.config else harness.ExperimentSpec())
    return spec.with_overrides(
        family=opts.family, p=opts.p, q=opts.q, a=opts.a, b=opts.b,
        beta=opts.beta, K=opts.K, c=opts.c, n=opts.n,
        balanced=False if opts.unbalanced else None,
        seed=getattr(opts, 'seed', None))


def _load_observed(opts):
    """Return (graph, covariate levels, reference labels or None)."""
    observed = ingest.load_graph(opts.edges)
    covariates = ingest.load_covariates(opts.covariates, opts.column,
                                        observed.vertex_ids, opts.thresholds)
    labels = None
    if opts.labels:
        labels = ingest.load_covariates(opts.labels, opts.label_column,
                                        observed.vertex_ids).levels
    return observed, covariates.levels, labels


def _simulate(opts):
    spec = _spec_from_opts(opts)
    labeled = sbm_model.sample(spec.build_model(), spec.n, spec.seed,
                               balanced=spec.balanced)
    ingest.write_edge_list(labeled.graph, opts.edges)
    ingest.write_rows(opts.labels, ['vertex', 'tau', 'xi', 'Z'],
                      labeled.label_table())
    print('wrote %d vertices, %d edges' % (labeled.graph.n,
                                           len(labeled.graph.edges())))
    return 0


def _write_vertex_labels(path, observed, labels, column):
    ingest.write_rows(path, ['vertex', column],
                      zip(observed.vertex_ids, (int(x) for x in labels)))


def _config_values(opts, **flags):
    """Return the --config values overridden by the non-None |flags|."""
    values = {}
    if opts.config:
        values = harness.ExperimentSpec.load_from_json(opts.config)._asdict()
    values.update((k, v) for k, v in flags.items() if v is not None)
    return values


def _value(values, name, default=None):
    value = values.get(name)
    return default if value is None else value


def _algo(opts):
    observed, Z, reference = _load_observed(opts)
    settings = _config_values(opts, c=opts.c, d=opts.d, d2=opts.d2,
                              gmm_components=opts.gmm_components,
                              k_max=opts.k_max, method=opts.method)
    if opts.config and settings.get('d2') is None:
        settings['d2'] = settings.get('d')
    c = _value(settings, 'c', np.unique(Z).size)
    k_range = range(c, _value(settings, 'k_max', 4 * c) + 1)
    if opts.command == 'algo1':
        result = inference.algo1(observed.graph, c, d=settings.get('d'),
                                 K=settings.get('gmm_components'),
                                 K_range=k_range, seed=opts.seed)
        labels = result.tau_hat
        print('d_hat=%d K_hat=%d flags=%s' % (result.d_hat, result.K_hat,
                                              ','.join(result.flags) or '-'))
    else:
        result = inference.algo2(observed.graph, Z, beta_known=opts.beta,
                                 method=_value(settings, 'method', 'WA'),
                                 d=settings.get('d'), d2=settings.get('d2'),
                                 K=settings.get('gmm_components'),
                                 K_range=k_range, seed=opts.seed,
                                 reselect_bic=opts.reselect_bic, c=c)
        labels = result.tau_tilde
        print('beta_hat=%.6g method=%s d_tilde=%d flags=%s' %
              (result.beta_hat, result.method, result.d_tilde,
               ','.join(result.flags) or '-'))
    if reference is not None:
        print('ari=%.6g' % cluster.ari(labels, reference))
    if opts.output:
        _write_vertex_labels(opts.output, observed, labels, 'tau')
    return 0


def _chernoff(opts, arg_parser):
    values = _config_values(opts, family=opts.family, p=opts.p, q=opts.q,
                            a=opts.a, b=opts.b, beta=opts.beta, K=opts.K)
    family, beta = values.get('family'), values.get('beta')
    if family is None or beta is None:
        arg_parser.error('chernoff needs --family and --beta, or --config')
    if family == 'rank_one':
        if values.get('p') is None or values.get('q') is None:
            arg_parser.error('rank_one needs --p and --q')
        report = chernoff.rho_rank_one(values['p'], values['q'], beta)
    else:
        if values.get('a') is None or values.get('b') is None:
            arg_parser.error('homogeneous needs --a and --b')
        report = chernoff.rho_homogeneous(values['a'], values['b'], beta,
                                          _value(values, 'K', 2))
    print('rho1_star=%.6g rho2_star=%.6g rho_star=%.6g argmin_pair=%s' %
          (report.rho1_star, report.rho2_star, report.rho_star,
           report.argmin_pair))
    for name, value in sorted(report.closed_form.items()):
        print('%s=%.6g' % (name, value))
    return 0


def _grid(opts, arg_parser):
    values = _config_values(opts, family=opts.family, p=opts.p, b=opts.b,
                            K=opts.K)
    if values.get('family') is None:
        arg_parser.error('grid needs --family or --config')
    fixed = {'p': _value(values, 'p', 0.3), 'b': _value(values, 'b', 0.1),
             'K': _value(values, 'K', 2)}
    workers = opts.workers or harness.default_workers()
    grid = chernoff.chernoff_grid(values['family'], fixed, opts.axis1,
                                  opts.axis2, opts.resolution,
                                  workers=workers)
    harness.emit_grid(grid, opts.output)
    missing = int(np.isnan(grid.values).sum())
    print('wrote %d cells (%d missing) to %s' % (grid.values.size, missing,
                                                 opts.output))
    return 0


def _experiment(opts, arg_parser):
    if opts.seed is None:
        arg_parser.error(SEED_REQUIRED_MSG)
    if opts.labels:
        if not (opts.edges and opts.covariates):
            arg_parser.error('--labels needs --edges and --covariates')
        observed, Z, reference = _load_observed(opts)
        record = harness.compare_on_graph(
            observed.graph, Z, reference, d=opts.d, d2=opts.d2,
            gmm_components=opts.gmm_components, k_max=opts.k_max,
            method=opts.method or 'WA', seed=opts.seed)
        summary = harness.summarize(None, [record])
        harness.emit_table([summary], opts.output,
                           include_timings=opts.timings)
        print('ari_algo1=%.6g ari_algo2=%.6g beta_hat=%.6g' %
              (record.ari_algo1, record.ari_algo2_est, record.beta_hat))
        return 0
    if not opts.configs:
        arg_parser.error('experiment needs config files or --labels')

    summaries = []
    for path in opts.configs:
        spec = harness.ExperimentSpec.load_from_json(path)
        if opts.quick:
            spec = spec.quick()
        spec = spec.with_overrides(seed=opts.seed, trials=opts.trials,
                                   d=opts.d, d2=opts.d2, method=opts.method,
                                   gmm_components=opts.gmm_components,
                                   k_max=opts.k_max)
        summary = harness.run_experiment(spec, workers=opts.workers)
        summaries.append(summary)
        print('%s: ari_algo1=%.3f ari_algo2=%.3f beta_hat=%.3f failures=%d' %
              (spec.name, summary.means['ari_algo1'],
               summary.means['ari_algo2_est'], summary.means['beta_hat'],
               summary.failures))
        if opts.records_dir:
            os.makedirs(opts.records_dir, exist_ok=True)
            harness.emit_records(
                summary, os.path.join(opts.records_dir, '%s.csv' % spec.name),
                include_timings=opts.timings)
    harness.emit_table(summaries, opts.output, include_timings=opts.timings)
    return 0


def _ingest(opts):
    observed = ingest.load_graph(opts.edges)
    os.makedirs(opts.output_dir, exist_ok=True)
    ingest.write_edge_list(observed.graph,
                           os.path.join(opts.output_dir, 'edges.csv'))
    ingest.write_id_map(observed.vertex_ids,
                        os.path.join(opts.output_dir, 'id_map.csv'))
    if opts.covariates:
        covariates = ingest.load_covariates(opts.covariates, opts.column,
                                            observed.vertex_ids,
                                            opts.thresholds)
        ingest.write_rows(os.path.join(opts.output_dir, 'covariates.csv'),
                          ['vertex', opts.column],
                          enumerate(covariates.levels.tolist()))
        ingest.write_rows(os.path.join(opts.output_dir, 'levels.csv'),
                          ['level', 'value'],
                          sorted(covariates.dictionary.items()))
    print('%d vertices, %d edges, %d duplicates, %d self-loops' %
          (observed.graph.n, len(observed.graph.edges()),
           observed.duplicates, observed.self_loops))
    if observed.remapped:
        print('vertex ids renumbered; originals are in id_map.csv')
    return 0


def main(argv=None):
    """Main entrypoint."""

    if argv is None:
        argv = sys.argv[1:]

    opts, arg_parser = parse_args(argv)
    logging.basicConfig(level=logging.INFO if opts.verbose else
                        logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        if opts.command == 'simulate':
            return _simulate(opts)
        if opts.command in ('algo1', 'algo2'):
            return _algo(opts)
        if opts.command == 'chernoff':
            return _chernoff(opts, arg_parser)
        if opts.command == 'grid':
            return _grid(opts, arg_parser)
        if opts.command == 'experiment':
            return _experiment(opts, arg_parser)
        return _ingest(opts)
    except _ERRORS as e:
        print('sbmcov: error: %s' % e, file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))
