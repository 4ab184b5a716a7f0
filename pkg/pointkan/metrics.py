# -*- coding: iso-8859-1 -*-
'''Module for prediction and the evaluation metrics.

Classification: overall accuracy (correct/total) and mean class accuracy
(unweighted mean of the per-class accuracies over the classes present).

Part segmentation: per-shape IoU over the parts of the shape's category,
with empty-vs-empty parts scored 1, category IoU as the mean over its
shapes and mean IoU as the shape-weighted average.

Semantic segmentation: per-class IoU = TP/(TP+FP+FN) over all points.
'''
'''
pointkan

This file is part of pointkan.

pointkan is free software: you can redistribute it and/or modify
it under the terms of the GNU Lesser General Public License as
published by the Free Software Foundation, either version 3 of
the License, or any later version.
'''

from collections import OrderedDict

import numpy

from . import omp_functions
from .display import display, warn
from .models import forward
from .tools import DataError

class Metrics(object):
  '''Evaluation result. Unused fields stay None.

  **Attributes:**

    overall_accuracy : float
    mean_class_accuracy : float
    per_class_accuracy : OrderedDict
      Class index -> accuracy (classes present only).
    per_category_iou : OrderedDict
      Category index -> mean shape IoU (part segmentation).
    class_iou : OrderedDict
      Class index -> TP/(TP+FP+FN) (semantic segmentation).
    mean_iou : float
    n_samples : int
  '''
  fields = ['overall_accuracy', 'mean_class_accuracy', 'per_class_accuracy',
            'per_category_iou', 'class_iou', 'mean_iou', 'n_samples']

  def __init__(self, **kwargs):
    for key in self.fields:
      setattr(self, key, kwargs.pop(key, None))
    if kwargs:
      raise TypeError('Unknown metrics field(s): %s' % ', '.join(sorted(kwargs)))

  def summary(self):
    '''Scalar metrics as an OrderedDict (for tables and logs).'''
    out = OrderedDict()
    for key in ['n_samples', 'overall_accuracy', 'mean_class_accuracy', 'mean_iou']:
      if getattr(self, key) is not None:
        out[key] = getattr(self, key)
    return out

  def table(self, class_names=None):
    '''Column table of the per-class (or per-category) values.'''
    per = self.per_class_accuracy or self.per_category_iou or self.class_iou or {}
    name = 'accuracy' if self.per_class_accuracy else 'iou'
    names = [class_names[i] if class_names and i < len(class_names) else str(i) for i in per]
    return OrderedDict([('class', names), (name, list(per.values()))])

  def __eq__(self, other):
    if not isinstance(other, Metrics):
      return NotImplemented
    return all(getattr(self, k) == getattr(other, k) for k in self.fields)

  def __ne__(self, other):
    return not self == other

  def __repr__(self):
    return 'Metrics(%s)' % ', '.join('%s=%.6g' % (k, v) if isinstance(v, float) else
                                     '%s=%s' % (k, v) for k, v in self.summary().items())

def classification_metrics(pred, target, n_classes=None):
  '''Accuracy metrics from predicted and true class indices.

  Classes with no sample in ``target`` are excluded from the class mean
  (with a warning if ``n_classes`` names them).
  '''
  pred = numpy.asarray(pred, dtype=int).reshape(-1)
  target = numpy.asarray(target, dtype=int).reshape(-1)
  if not target.size:
    raise DataError('Cannot evaluate an empty dataset.')
  if pred.shape != target.shape:
    raise DataError('%d predictions given for %d samples.' % (pred.size, target.size))
  if numpy.any(target < 0):
    raise DataError('Every sample needs a class label for the evaluation.')
  n_classes = int(target.max()) + 1 if n_classes is None else int(n_classes)
  support = numpy.bincount(target, minlength=n_classes)
  correct = numpy.bincount(target[pred == target], minlength=n_classes)
  absent = [c for c in range(n_classes) if not support[c]]
  if absent:
    warn('Class(es) %s absent from the dataset; excluded from the class mean.'
         % ', '.join(str(c) for c in absent))
  per_class = OrderedDict((c, correct[c]/float(support[c]))
                          for c in range(len(support)) if support[c])
  return Metrics(overall_accuracy=float(numpy.mean(pred == target)),
                 mean_class_accuracy=float(numpy.mean(list(per_class.values()))),
                 per_class_accuracy=per_class, n_samples=int(target.size))

def shape_iou(pred, target, parts):
  '''Mean IoU over ``parts`` of one shape; empty-vs-empty parts count 1.'''
  pred = numpy.asarray(pred)
  target = numpy.asarray(target)
  ious = []
  for p in parts:
    union = numpy.sum((pred == p) | (target == p))
    inter = numpy.sum((pred == p) & (target == p))
    ious.append(1. if union == 0 else inter/float(union))
  return float(numpy.mean(ious))

def part_iou_metrics(preds, targets, categories, category_parts):
  '''Part-segmentation metrics over lists of per-shape label arrays.'''
  if not len(targets):
    raise DataError('Cannot evaluate an empty dataset.')
  per_shape = []
  by_category = OrderedDict()
  correct = total = 0
  for pred, target, category in zip(preds, targets, categories):
    if category not in category_parts:
      raise DataError('Category %s has no part list.' % category)
    value = shape_iou(pred, target, category_parts[category])
    per_shape.append(value)
    by_category.setdefault(category, []).append(value)
    correct += int(numpy.sum(numpy.asarray(pred) == numpy.asarray(target)))
    total += numpy.size(target)
  per_category = OrderedDict((c, float(numpy.mean(by_category[c])))
                             for c in sorted(by_category))
  return Metrics(overall_accuracy=correct/float(total), per_category_iou=per_category,
                 mean_iou=float(numpy.mean(per_shape)), n_samples=len(per_shape))

def scene_iou_metrics(preds, targets, n_classes=None):
  '''Semantic-segmentation metrics pooled over all points.'''
  if not len(targets):
    raise DataError('Cannot evaluate an empty dataset.')
  pred = numpy.concatenate([numpy.asarray(p, dtype=int).reshape(-1) for p in preds])
  target = numpy.concatenate([numpy.asarray(t, dtype=int).reshape(-1) for t in targets])
  n_classes = int(max(pred.max(), target.max())) + 1 if n_classes is None else int(n_classes)
  tp = numpy.bincount(target[pred == target], minlength=n_classes).astype(float)
  fp = numpy.bincount(pred[pred != target], minlength=n_classes).astype(float)
  fn = numpy.bincount(target[pred != target], minlength=n_classes).astype(float)
  union = tp + fp + fn
  class_iou = OrderedDict((c, tp[c]/union[c]) for c in range(n_classes) if union[c] > 0)
  return Metrics(overall_accuracy=float(numpy.mean(pred == target)), class_iou=class_iou,
                 mean_iou=float(numpy.mean(list(class_iou.values()))),
                 n_samples=len(targets))

def restrict_logits(logits, categories, category_parts):
  '''Sets the logits of parts outside each shape's category to -inf.'''
  out = numpy.array(logits, dtype=numpy.float64)
  for b, category in enumerate(categories):
    mask = numpy.ones(out.shape[-1], dtype=bool)
    mask[[p for p in category_parts.get(int(category), []) if p < out.shape[-1]]] = False
    if mask.all():
      continue
    out[b][..., mask] = -numpy.inf
  return out

def _predict_indices(indices):
  model, dataset, batch_size, category_parts = omp_functions.global_args
  out = []
  for start in range(0, len(indices), batch_size):
    batch = dataset.batch(indices[start:start + batch_size])
    logits = forward(model, batch, mode='eval').data
    if category_parts is not None and logits.ndim == 3 and batch.categories is not None:
      logits = restrict_logits(logits, batch.categories, category_parts)
    out.extend(numpy.argmax(logits, axis=-1))
  return out

def predict_labels(model, dataset, batch_size=32, restrict_parts=True, numproc=1):
  '''Predicts every cloud of ``dataset`` in eval mode.

  **Returns:**

    labels : list
      One class index per cloud (classification) or one N-vector of point
      labels per cloud (segmentation), in dataset order.
  '''
  if not len(dataset):
    raise DataError('Cannot predict an empty dataset.')
  category_parts = None
  if restrict_parts and model.config.branch == 'part_seg':
    category_parts = dataset.category_parts() or None
  model.set_mode('eval')
  chunks = [numpy.arange(s, e) for s, e in
            omp_functions.slicer(len(dataset), slice_length=max(batch_size, 1), numproc=numproc)]
  results = omp_functions.run(_predict_indices, chunks, numproc=numproc,
                              display=display if numproc > 1 else None,
                              global_args=(model, dataset, batch_size, category_parts))
  return [label for chunk in results for label in chunk]

def evaluate_cls(model, dataset, batch_size=32, numproc=1):
  '''Overall and mean class accuracy of a classifier on ``dataset``.'''
  if not len(dataset):
    raise DataError('Cannot evaluate an empty dataset.')
  pred = predict_labels(model, dataset, batch_size=batch_size, numproc=numproc)
  return classification_metrics(pred, dataset.shape_labels(), n_classes=model.config.k)

def evaluate_iou(model, dataset, per_shape=True, restrict_parts=True, batch_size=32,
                 numproc=1):
  '''IoU metrics of a segmentation network on ``dataset``.

  **Parameters:**

    per_shape : bool
      If True, the part-segmentation protocol (shape-averaged IoU over the
      category's parts), otherwise scene-style class IoU over all points.
    restrict_parts : bool
      If True, the argmax runs over the parts of each shape's category.
  '''
  if not len(dataset):
    raise DataError('Cannot evaluate an empty dataset.')
  targets = [pc.point_labels for pc in dataset]
  if any(t is None for t in targets):
    raise DataError('IoU evaluation requires per-point labels for every cloud.')
  preds = predict_labels(model, dataset, batch_size=batch_size,
                         restrict_parts=restrict_parts, numproc=numproc)
  if not per_shape:
    return scene_iou_metrics(preds, targets, n_classes=model.config.k)
  categories = [pc.category for pc in dataset]
  if any(c is None for c in categories):
    raise DataError('Part IoU requires the category of every cloud.')
  return part_iou_metrics(preds, targets, categories, dataset.category_parts())

def evaluate(model, dataset, restrict_parts=True, batch_size=32, numproc=1):
  '''Dispatches to the metrics of the model's branch.'''
  branch = model.config.branch
  if branch in ['classification', 'hybridpp']:
    return evaluate_cls(model, dataset, batch_size=batch_size, numproc=numproc)
  return evaluate_iou(model, dataset, per_shape=branch == 'part_seg',
                      restrict_parts=restrict_parts, batch_size=batch_size, numproc=numproc)
