# -*- coding: iso-8859-1 -*-
'''Module for the robustness sweep (random point dropping) and the ablation
sweeps over the polynomial degree and the Jacobi parameters.'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

from collections import OrderedDict

from .display import display
from .layers import param_count
from .metrics import evaluate
from .models import build_model
from .pointcloud import Dataset
from .sampling import drop_points
from .tools import ConfigError, derive_seed
from .train import train

#: Polynomial degrees of the degree sweep (alpha=beta=1).
degree_sweep = [2, 3, 4, 5, 6]

#: (alpha, beta) settings of the Jacobi parameter sweep (degree 2).
alpha_beta_sweep = [(0., 0.), (-0.5, -0.5), (0.5, 0.5), (1., 1.), (1., 2.), (2., 1.)]

sweeps = ['degree', 'alpha_beta']

def _score_columns(model):
  if model.config.branch in ['classification', 'hybridpp']:
    return ['mean_class_accuracy', 'overall_accuracy']
  return ['mean_iou']

def dropped_dataset(dataset, keep, seed=0):
  '''Copy of ``dataset`` with every cloud reduced to ``keep`` random points.
  Cloud i is subsampled with seed xor i.'''
  clouds = [drop_points(pc, keep, seed=derive_seed(seed, i)) for i, pc in enumerate(dataset)]
  return Dataset(clouds, dataset.class_names, dataset.splits, parts=dataset.parts)

def robustness_sweep(model, dataset, keep_counts, seed=0, numproc=1):
  '''Evaluates ``model`` on randomly subsampled copies of ``dataset``.

  **Parameters:**

    keep_counts : sequence of int
      Number of points kept per cloud, e.g. [256, 128, 64, 32].

  **Returns:**

    table : OrderedDict
      Columns ``keep`` and the branch's score columns.
  '''
  columns = _score_columns(model)
  table = OrderedDict([('keep', [])] + [(c, []) for c in columns])
  for keep in keep_counts:
    metrics = evaluate(model, dropped_dataset(dataset, int(keep), seed), numproc=numproc)
    table['keep'].append(int(keep))
    for c in columns:
      table[c].append(getattr(metrics, c))
    display('\tkeep %4d: %s' % (keep, ', '.join('%s %.4f' % (c, getattr(metrics, c))
                                                for c in columns)))
  return table

def sweep_settings(sweep, values=None):
  '''Model overrides of one ablation sweep.'''
  if sweep == 'degree':
    return [dict(degree=int(n), alpha=1., beta=1.) for n in (values or degree_sweep)]
  elif sweep == 'alpha_beta':
    return [dict(degree=2, alpha=float(a), beta=float(b))
            for a, b in (values or alpha_beta_sweep)]
  raise ConfigError('Unknown sweep "%s" (choose from "%s").' % (sweep, '", "'.join(sweeps)))

def ablation(dataset, model_config, train_config, sweep='degree', values=None,
             test_split='test', numproc=1):
  '''Trains and evaluates one network per sweep setting.

  **Returns:**

    table : OrderedDict
      Columns ``degree``, ``alpha``, ``beta``, ``params`` and the score
      columns of the branch (mean class and overall accuracy, or mean IoU).
  '''
  test_set = dataset.split(test_split)
  table = None
  for setting in sweep_settings(sweep, values):
    cfg = model_config.replace(**setting)
    display('Ablation %s: degree=%d alpha=%g beta=%g' % (sweep, cfg.degree, cfg.alpha, cfg.beta))
    model = build_model(cfg)
    train(model, dataset, train_config, numproc=numproc)
    metrics = evaluate(model, test_set, restrict_parts=train_config.restrict_parts,
                       numproc=numproc)
    columns = _score_columns(model)
    if table is None:
      table = OrderedDict((c, []) for c in ['degree', 'alpha', 'beta', 'params'] + columns)
    table['degree'].append(cfg.degree)
    table['alpha'].append(cfg.alpha)
    table['beta'].append(cfg.beta)
    table['params'].append(param_count(model)['total'])
    for c in columns:
      table[c].append(getattr(metrics, c))
  return table
