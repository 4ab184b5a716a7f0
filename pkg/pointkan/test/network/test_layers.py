'''
Test the shared layers, their initialization and the parameter accounting
'''
import numpy

from pointkan.autodiff import constant
from pointkan.jacobi import JacobiParams, eval_basis
from pointkan.layers import (KanLayer, MlpLayer, BatchNorm, kan_init, mlp_init,
                             param_count, kan_width_sum)
from pointkan.models import ModelConfig, build_model, presets, branches
from pointkan.tools import ConfigError
from pointkan.test.tools import equal, raises

def test_kan_layer_forward():
  p = JacobiParams(1., 1., 3)
  layer = KanLayer(4, 5, p, seed=0)
  x = numpy.random.RandomState(0).normal(size=(7, 4))
  out = layer.forward(constant(x)).data
  ref = numpy.einsum('pci,icj->pj', eval_basis(p, numpy.tanh(x)), layer.omega.data)
  equal(out, ref, tol=1e-12)
  assert layer.omega.shape == (4, 4, 5)
  assert layer.count() == 4*4*5

def test_layers_are_shared():
  layer = KanLayer(3, 2, JacobiParams(0., 0., 2), seed=1)
  x = numpy.random.RandomState(1).normal(size=(2, 6, 3))
  out = layer.forward(constant(x)).data
  single = layer.forward(constant(x[1, 4])).data
  equal(out[1, 4], single, tol=1e-14)

def test_kan_init():
  p = JacobiParams(1., 1., 4)
  omega = kan_init(200, 300, p, seed=0)
  assert omega.shape == (5, 200, 300)
  equal(omega.std(), numpy.sqrt(1./1000.), tol=2e-4)
  equal(kan_init(3, 2, p, seed=5), kan_init(3, 2, p, seed=5))

def test_mlp_layer():
  weight, bias = mlp_init(400, 300, seed=0)
  equal(weight.std(), numpy.sqrt(2./400.), tol=2e-3)
  equal(bias, numpy.zeros(300))
  layer = MlpLayer(3, 4, activation='none', seed=0)
  x = numpy.random.RandomState(2).normal(size=(5, 3))
  equal(layer.forward(constant(x)).data, x.dot(layer.weight.data))
  assert layer.count() == 3*4 + 4
  raises(ConfigError, MlpLayer, 3, 4, activation='sigmoid')

def test_invalid_widths():
  raises(ConfigError, KanLayer, 0, 4, JacobiParams())
  raises(ConfigError, MlpLayer, 3, -1)
  raises(ConfigError, BatchNorm, 0)

def test_batch_norm_layer():
  bn = BatchNorm(8)
  assert bn.count() == 16
  assert [name for name, _ in bn.parameters()] == ['bn.scale', 'bn.shift']
  bn.forward(constant(numpy.random.RandomState(3).normal(size=(10, 8))), 'eval')
  assert bn.state.mode == 'eval'

def test_classification_count():
  model = build_model(ModelConfig('classification'))
  count = param_count(model)
  # (n+1)*d*W + 2W + (n+1)*W*k with d=6, W=3072, n=4, k=40
  equal(count['kan'], 5*6*3072 + 5*3072*40)
  equal(count['bn'], 2*3072)
  equal(count['mlp'], 0)
  equal(count['total'], 5*6*3072 + 2*3072 + 5*3072*40)
  assert [l[0] for l in count['layers']] == ['encoder0', 'encoder0_bn', 'output']

def test_segmentation_count():
  model = build_model(ModelConfig('part_seg'))
  count = param_count(model)
  n1 = 3
  kan = n1*(3*640 + 640*5120 + (640 + 5120 + 16)*640 + 640*50)
  equal(count['kan'], kan)
  equal(count['bn'], 2*(640 + 5120 + 640))
  hybrid = build_model(ModelConfig('part_seg', decoder_kind='mlp'))
  hcount = param_count(hybrid)
  equal(hcount['mlp'], (640 + 5120 + 16)*640 + 640 + 640*50 + 50)
  encoder = lambda c: [l for l in c['layers'] if l[0].startswith('encoder')]
  assert encoder(count) == encoder(hcount)

def test_degree_increment():
  for branch in branches:
    for preset in sorted(presets):
      if preset == 'deep' and branch == 'hybridpp':
        continue
      cfg = ModelConfig(branch, preset=preset)
      low = build_model(cfg.replace(degree=2))
      high = build_model(cfg.replace(degree=3))
      delta = param_count(high)['total'] - param_count(low)['total']
      assert delta == kan_width_sum(low), (branch, preset)
