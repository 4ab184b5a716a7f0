'''
Test accuracies, intersection over union and the prediction helpers
'''
import warnings

import numpy

from pointkan.metrics import (Metrics, classification_metrics, shape_iou,
                              part_iou_metrics, scene_iou_metrics, restrict_logits,
                              predict_labels, evaluate, evaluate_cls, evaluate_iou)
from pointkan.models import ModelConfig, build_model
from pointkan.pointcloud import Dataset
from pointkan.synthetic import make_dataset
from pointkan.tools import DataError
from pointkan.test.tools import equal, raises

def test_imbalanced_accuracy():
  target = numpy.array([0]*10 + [1]*90)
  pred = numpy.zeros(100, dtype=int)
  metrics = classification_metrics(pred, target)
  equal(metrics.overall_accuracy, 0.10, tol=1e-12)
  equal(metrics.mean_class_accuracy, 0.50, tol=1e-12)
  assert list(metrics.per_class_accuracy.values()) == [1., 0.]
  assert metrics.n_samples == 100

def test_absent_classes():
  with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter('always')
    metrics = classification_metrics([0, 2, 2], [0, 2, 0], n_classes=4)
  assert any('absent' in str(w.message) for w in caught)
  assert list(metrics.per_class_accuracy) == [0, 2]
  equal(metrics.mean_class_accuracy, 0.75, tol=1e-12)

def test_classification_errors():
  raises(DataError, classification_metrics, [], [])
  raises(DataError, classification_metrics, [0, 1], [0])
  raises(DataError, classification_metrics, [0], [-1])

def test_shape_iou():
  equal(shape_iou([0, 0, 1, 1], [0, 1, 1, 0], [0, 1]), 1./3., tol=1e-12)
  # a part absent from both prediction and ground truth counts as 1
  equal(shape_iou([0, 1], [0, 1], [0, 1, 2]), 1., tol=1e-12)
  equal(shape_iou([0, 0], [1, 1], [0, 1]), 0., tol=1e-12)

def brute_force_class_iou(pred, target, n_classes):
  confusion = numpy.zeros((n_classes, n_classes))
  for p, t in zip(pred, target):
    confusion[t, p] += 1
  ious = {}
  for c in range(n_classes):
    tp = confusion[c, c]
    union = confusion[c, :].sum() + confusion[:, c].sum() - tp
    if union > 0:
      ious[c] = tp / union
  return ious

def test_scene_iou_against_confusion_matrix():
  rng = numpy.random.RandomState(0)
  for _ in range(50):
    n_classes = rng.randint(2, 8)
    preds = [rng.randint(n_classes, size=rng.randint(1, 40)) for _ in range(3)]
    targets = [rng.randint(n_classes, size=len(p)) for p in preds]
    metrics = scene_iou_metrics(preds, targets, n_classes)
    ref = brute_force_class_iou(numpy.concatenate(preds), numpy.concatenate(targets),
                                n_classes)
    assert sorted(metrics.class_iou) == sorted(ref)
    for c in ref:
      equal(metrics.class_iou[c], ref[c], tol=1e-12)
    equal(metrics.mean_iou, numpy.mean(list(ref.values())), tol=1e-12)
  raises(DataError, scene_iou_metrics, [], [])

def test_part_iou_metrics():
  preds = [numpy.array([0, 0, 1, 1]), numpy.array([2, 2, 2])]
  targets = [numpy.array([0, 1, 1, 0]), numpy.array([2, 2, 3])]
  parts = {0: [0, 1], 1: [2, 3]}
  metrics = part_iou_metrics(preds, targets, [0, 1], parts)
  equal(metrics.per_category_iou[0], 1./3., tol=1e-12)
  equal(metrics.per_category_iou[1], (2./3. + 0.)/2., tol=1e-12)
  equal(metrics.mean_iou, (1./3. + 1./3.)/2., tol=1e-12)
  equal(metrics.overall_accuracy, 4./7., tol=1e-12)
  raises(DataError, part_iou_metrics, preds, targets, [0, 5], parts)
  raises(DataError, part_iou_metrics, [], [], [], parts)

def test_restrict_logits():
  logits = numpy.zeros((2, 3, 4))
  logits[..., 3] = 5.
  out = restrict_logits(logits, [0, 1], {0: [0, 1], 1: [2, 3]})
  equal(numpy.argmax(out, axis=-1), numpy.array([[0, 0, 0], [3, 3, 3]]))
  assert numpy.all(numpy.isneginf(out[0][..., 2:]))
  equal(logits[..., 3], numpy.full((2, 3), 5.))

def test_metrics_container():
  m = Metrics(overall_accuracy=0.5, n_samples=4)
  assert list(m.summary()) == ['n_samples', 'overall_accuracy']
  assert m == Metrics(overall_accuracy=0.5, n_samples=4)
  raises(TypeError, Metrics, accuracy=1.)
  m = classification_metrics([0, 1, 1], [0, 1, 0])
  assert m.table(['a', 'b'])['class'] == ['a', 'b']

def test_model_evaluation():
  dataset = make_dataset(['sphere', 'mug'], train=2, test=2, n_points=16, seed=2)
  test = dataset.split('test')
  model = build_model(ModelConfig('classification', d=3, k=2, encoder_widths=[8], degree=2))
  labels = predict_labels(model, test)
  assert len(labels) == 4
  assert evaluate(model, test) == evaluate_cls(model, test)
  equal(evaluate_cls(model, test).overall_accuracy,
        numpy.mean(numpy.array(labels) == test.shape_labels()), tol=1e-12)
  cfg = ModelConfig('part_seg', d=3, k=2, one_hot_size=2, encoder_widths=[6, 8],
                    decoder_widths=[4])
  seg = build_model(cfg)
  labels = predict_labels(seg, test)
  assert all(l.shape == (16,) for l in labels)
  # the sphere category only owns part 0
  assert all(numpy.all(l == 0) for l, pc in zip(labels, test) if pc.category == 0)
  metrics = evaluate(seg, test)
  assert 0. <= metrics.mean_iou <= 1. and sorted(metrics.per_category_iou) == [0, 1]
  scene = evaluate_iou(seg, test, per_shape=False)
  assert scene.class_iou is not None
  raises(DataError, evaluate_cls, model, Dataset([]))
