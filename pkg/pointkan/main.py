#!/usr/bin/env python
# -*- coding: iso-8859-1 -*-
'''Module for controlling all tasks of the standalone program.'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

lgpl_short = '''This is pointkan.
  This program comes with ABSOLUTELY NO WARRANTY.
  This is free software, and you are welcome to redistribute it
  under certain conditions. Type '-l' for details.
'''

# Import general modules
import os
import sys
import time
from collections import OrderedDict

import numpy

# Import pointkan modules
from pointkan import options, output
import pointkan.display as display_module
from pointkan.display import display, good_bye_message
from pointkan.convert import convert
from pointkan.experiments import robustness_sweep, ablation
from pointkan.layers import param_count
from pointkan.metrics import evaluate_cls, evaluate_iou, predict_labels
from pointkan.models import build_model, flops_estimate
from pointkan.read import read_dataset
from pointkan.synthetic import make_dataset
from pointkan.tools import PointkanError, ConfigError, DataError
from pointkan.train import train, load_checkpoint

def _base(path, suffix):
  if options.outputname:
    return options.outputname
  return '%s_%s' % (os.path.splitext(os.path.normpath(path))[0], suffix)

def _load_dataset(path):
  return read_dataset(path, numproc=options.config['run.workers'])

def _eval_split(dataset):
  name = options.config['data.split']
  if dataset.has_split(name):
    return dataset.split(name)
  display('Dataset has no "%s" split; using all %d clouds.' % (name, len(dataset)))
  return dataset

def _checked_pair(checkpoint, dataset):
  model, meta, _ = load_checkpoint(checkpoint)
  if dataset.d != model.config.d:
    raise ConfigError('Checkpoint %s expects d=%d features per point, the dataset has d=%d.'
                      % (checkpoint, model.config.d, dataset.d))
  return model, meta

def _write(table, name):
  if options.otype:
    return output.main_output(table, outputname=name, otype=options.otype)
  return []

def run_synth():
  cfg = options.config
  classes = [c.strip() for c in cfg['data.classes'].split(',') if c.strip()]
  dataset = make_dataset(classes, train=cfg['data.train_per_class'],
                         test=cfg['data.test_per_class'], n_points=cfg['data.n_points'],
                         seed=cfg['run.seed'], with_normals=cfg['data.with_normals'],
                         jitter=cfg['data.jitter'], val=cfg['data.val_per_class'])
  output.write_dataset(dataset, options.outputname)
  display('Wrote %r to %s' % (dataset, options.outputname))
  return dataset

def run_convert():
  cfg = options.config
  return convert(options.args[0], options.outputname, itype=options.itype,
                 n_points=cfg['data.convert_points'] or None,
                 with_normals=cfg['data.with_normals'], seed=cfg['run.seed'],
                 numproc=cfg['run.workers'])

def run_train():
  dataset = _load_dataset(options.args[0])
  model_cfg = options.model_config_from_options(dataset)
  train_cfg = options.train_config_from_options(model_cfg, dataset)
  display('Model: %r' % model_cfg)
  display('Training: %r' % train_cfg)
  model = build_model(model_cfg)
  display('Trainable parameters: %d' % param_count(model)['total'])
  result = train(model, dataset, train_cfg, outputname=_base(options.args[0], 'model'),
                 numproc=options.config['run.workers'])
  if result['best_epoch'] is not None:
    display('Best epoch: %d' % result['best_epoch'])
  return result

def run_eval():
  dataset = _load_dataset(options.args[1])
  model, meta = _checked_pair(options.args[0], dataset)
  dataset = _eval_split(dataset)
  cfg = options.config
  if model.config.branch in ['classification', 'hybridpp']:
    metrics = evaluate_cls(model, dataset, batch_size=cfg['run.batch_size'],
                           numproc=cfg['run.workers'])
  else:
    metrics = evaluate_iou(model, dataset,
                           per_shape=cfg['run.per_shape'] and model.config.branch == 'part_seg',
                           restrict_parts=cfg['train.restrict_parts'],
                           batch_size=cfg['run.batch_size'], numproc=cfg['run.workers'])
  summary = OrderedDict((k, [v]) for k, v in metrics.summary().items())
  display(output.pretty_table(summary))
  display(output.pretty_table(metrics.table(dataset.class_names)))
  _write(summary, _base(options.args[0], 'metrics'))
  return metrics

def run_robustness():
  dataset = _load_dataset(options.args[1])
  model, meta = _checked_pair(options.args[0], dataset)
  dataset = _eval_split(dataset)
  keeps = options.config['data.keep_counts']
  display('Robustness sweep over keep counts %s' % keeps)
  table = robustness_sweep(model, dataset, keeps, seed=options.config['run.seed'],
                           numproc=options.config['run.workers'])
  display(output.pretty_table(table))
  _write(table, _base(options.args[0], 'robustness'))
  return table

def run_count():
  cfg = options.config
  if options.args:
    model = load_checkpoint(options.args[0])[0]
    n_points = cfg['data.convert_points'] or cfg['data.n_points']
  else:
    model_cfg = options.model_config_from_options()
    model = build_model(model_cfg)
    n_points = cfg['data.convert_points'] or (1024 if model_cfg.branch != 'part_seg' else 2048)
  count = param_count(model)
  flops = flops_estimate(model, n_points)
  table = OrderedDict([('layer', []), ('kind', []), ('params', [])])
  for name, kind, c in count['layers']:
    table['layer'].append(name)
    table['kind'].append(kind)
    table['params'].append(c)
  for kind in ['kan', 'mlp', 'bn', 'total']:
    table['layer'].append(kind + '_total' if kind != 'total' else 'total')
    table['kind'].append('')
    table['params'].append(count[kind])
  display(output.pretty_table(table))
  display('FLOPs per sample (N=%d): %d' % (n_points, flops['total']))
  display(flops['convention'])
  if options.outputname:
    _write(table, options.outputname)
  return count, flops

def run_predict():
  dataset = _load_dataset(options.args[1])
  model, meta = _checked_pair(options.args[0], dataset)
  cfg = options.config
  labels = predict_labels(model, dataset, batch_size=cfg['run.batch_size'],
                          restrict_parts=cfg['train.restrict_parts'],
                          numproc=cfg['run.workers'])
  names = [pc.name for pc in dataset]
  table = OrderedDict([('name', names)])
  if model.config.is_segmentation:
    tabular = any(o in ['csv', 'txt'] for o in options.otype)
    table['labels'] = ([' '.join(str(int(i)) for i in l) for l in labels] if tabular
                       else numpy.array(labels, dtype=int))
  else:
    table['label'] = [int(l) for l in labels]
    if dataset.class_names:
      table['class'] = [dataset.class_names[int(l)] if int(l) < len(dataset.class_names)
                        else str(int(l)) for l in labels]
  written = _write(table, options.outputname)
  display('Predictions of %d clouds written to %s' % (len(names), ', '.join(written)))
  return labels

def run_ablation():
  dataset = _load_dataset(options.args[0])
  model_cfg = options.model_config_from_options(dataset)
  train_cfg = options.train_config_from_options(model_cfg, dataset)
  table = ablation(dataset, model_cfg, train_cfg, sweep=options.config['run.sweep'],
                   test_split=options.config['data.split'],
                   numproc=options.config['run.workers'])
  display(output.pretty_table(table))
  _write(table, _base(options.args[0], 'ablation_%s' % options.config['run.sweep']))
  return table

def run_test():
  from pointkan.test import test
  return test()

tasks = {'synth': run_synth,
         'convert-off': run_convert,
         'train': run_train,
         'eval': run_eval,
         'robustness': run_robustness,
         'count': run_count,
         'predict': run_predict,
         'ablation': run_ablation,
         'test': run_test,
         } #: Subcommand -> task.

def run_pointkan(check_options=True, standalone=False, argv=None):
  '''Controls the execution of the subcommand set in :mod:`pointkan.options`.

  **Parameters:**

  check_options : bool, optional
    If True, the specified options will be validated.
  standalone : bool, optional
    If True, the options are read from the command line (or ``argv``).

  **Returns:**

  data : type depends on the subcommand.
  '''
  if standalone:
    # Call the parser
    options.init_parser(argv)
  elif check_options:
    options.check_options(display=display)

  display(lgpl_short)

  # Measurement of required execution time
  t = [time.time()]

  data = tasks[options.command]()

  t.append(time.time()) # Final time
  good_bye_message(t)
  return data
  # run_pointkan

def init(reset_display=True):
  ''' Resets all :mod:`pointkan.options` and :mod:`pointkan.display`.
  '''
  from importlib import reload
  reload(options)
  if reset_display:
    reload(display_module)

def run_standalone(argv=None):
  '''Starts pointkan as a standalone program using parser options
  (:func:`pointkan.options.init_parser`).

  **Returns:**

    exit_code : int
      0 on success, otherwise the ``exit_code`` of the raised error
      (2 configuration, 3 data, 4 numerics). The error is reported as one
      line ``<ErrorClass>: <message>`` on stderr.
  '''
  try:
    data = run_pointkan(standalone=True, argv=argv)
  except PointkanError as err:
    sys.stderr.write('%s: %s\n' % (err.__class__.__name__, err))
    return err.exit_code
  except NotImplementedError as err:
    sys.stderr.write('ConfigError: %s\n' % err)
    return ConfigError.exit_code
  except EnvironmentError as err:
    sys.stderr.write('DataError: %s\n' % err)
    return DataError.exit_code
  if options.command == 'test':
    return 0 if data else 1
  return 0
