'''
Test the cloud containers, surface sampling, normalization, block partition
and the synthetic shapes
'''
import numpy
from scipy import stats

from pointkan.pointcloud import PointCloud, TriangleMesh, Dataset
from pointkan.sampling import (sample_mesh, normalize_unit_sphere, drop_points,
                               resample, block_partition)
from pointkan.synthetic import sample_shape, gen_synthetic, make_dataset, generators
from pointkan.tools import ConfigError, DataError
from pointkan.test.tools import equal, raises, random_cloud

two_triangles = TriangleMesh([[0., 0., 0.], [1., 0., 0.], [0., 2., 0.],
                              [2., 0., 0.], [5., 0., 0.], [2., 2., 0.]],
                             [[0, 1, 2], [3, 4, 5]])

def test_mesh_areas():
  equal(two_triangles.areas(), numpy.array([1., 3.]))
  equal(two_triangles.face_normals(), numpy.array([[0., 0., 1.], [0., 0., 1.]]))
  flat = TriangleMesh([[0., 0., 0.], [1., 0., 0.], [2., 0., 0.]], [[0, 1, 2]])
  equal(flat.face_normals(), numpy.zeros((1, 3)))
  raises(DataError, TriangleMesh, [[0., 0., 0.]], [[0, 1, 2]])

def test_sampling_follows_area():
  pc = sample_mesh(two_triangles, 10000, seed=0)
  assert pc.features.shape == (10000, 3)
  first = pc.xyz[:, 0] < 1.5
  observed = [first.sum(), (~first).sum()]
  assert stats.chisquare(observed, [2500., 7500.]).pvalue > 0.001
  a = pc.xyz[first]
  assert numpy.all(a[:, 0] >= -1e-12) and numpy.all(a[:, 1] >= -1e-12)
  assert numpy.all(a[:, 0] + 0.5*a[:, 1] <= 1. + 1e-12)
  # uniform within the face: the mean is the centroid
  equal(a[:, :2].mean(axis=0), numpy.array([1./3., 2./3.]), tol=0.03)

def test_sampling_options():
  pc = sample_mesh(two_triangles, 50, seed=1, with_normals=True, shape_label=3)
  assert pc.d == 6 and pc.shape_label == 3
  equal(pc.normals, numpy.tile([0., 0., 1.], (50, 1)))
  equal(sample_mesh(two_triangles, 20, seed=4).features,
        sample_mesh(two_triangles, 20, seed=4).features, tol=0.)
  flat = TriangleMesh([[0., 0., 0.], [1., 0., 0.], [2., 0., 0.]], [[0, 1, 2]])
  raises(DataError, sample_mesh, flat, 10)
  raises(DataError, sample_mesh, TriangleMesh(numpy.zeros((0, 3)), numpy.zeros((0, 3))), 10)

def test_normalize():
  features = numpy.hstack([random_cloud(40, 3, seed=2)*5. + 3., numpy.ones((40, 3))])
  pc = normalize_unit_sphere(PointCloud(features))
  equal(pc.xyz.mean(axis=0), numpy.zeros(3), tol=1e-12)
  equal(numpy.max(numpy.linalg.norm(pc.xyz, axis=1)), 1., tol=1e-12)
  equal(pc.normals, numpy.ones((40, 3)))
  raises(DataError, normalize_unit_sphere, PointCloud(numpy.ones((5, 3))))
  raises(DataError, normalize_unit_sphere, PointCloud(numpy.zeros((0, 3))))

def test_drop_points():
  labels = numpy.arange(30)
  pc = PointCloud(random_cloud(30, 3), point_labels=labels, shape_label=2)
  kept = drop_points(pc, 12, seed=5)
  assert kept.N == 12 and kept.shape_label == 2
  assert len(set(kept.point_labels)) == 12
  equal(kept.features, pc.features[kept.point_labels])
  equal(drop_points(pc, 30, seed=1).N, 30)
  equal(drop_points(pc, 12, seed=5).features, kept.features, tol=0.)
  raises(DataError, drop_points, pc, 31)
  raises(DataError, drop_points, pc, 0)

def test_resample():
  pc = PointCloud(random_cloud(10, 3), point_labels=numpy.arange(10))
  small = resample(pc, 4, seed=0)
  assert len(set(small.point_labels)) == 4
  large = resample(pc, 25, seed=0)
  assert large.N == 25 and set(large.point_labels) == set(range(10))

def test_block_partition():
  rng = numpy.random.RandomState(3)
  xyz = rng.uniform(0., 1., size=(500, 3)) * [2.5, 1.5, 3.]
  rgb = rng.uniform(0., 1., size=(500, 3))
  scene = PointCloud(numpy.hstack([xyz, rgb]), point_labels=rng.randint(13, size=500),
                     name='room')
  blocks = block_partition(scene, block=1.0, points_per_block=64, seed=0)
  assert len(blocks) == 6
  for pc in blocks:
    assert pc.features.shape == (64, 9)
    assert numpy.all(pc.features[:, 6:] >= 0.) and numpy.all(pc.features[:, 6:] <= 1.)
    cell = numpy.floor(pc.xyz[:, :2] - xyz.min(axis=0)[:2]).astype(int)
    assert len(set(map(tuple, cell))) == 1
  assert blocks[0].name == 'room_0_0'
  raises(DataError, block_partition, PointCloud(xyz, point_labels=numpy.zeros(500)))
  raises(DataError, block_partition, PointCloud(numpy.hstack([xyz, rgb])))

def test_point_cloud_contract():
  raises(DataError, PointCloud, numpy.zeros(5))
  raises(DataError, PointCloud, numpy.zeros((4, 3)), point_labels=[0, 1])
  pc = PointCloud(numpy.zeros((4, 3)), shape_label=-1)
  assert pc.shape_label is None and pc.normals is None

def test_dataset():
  clouds = [PointCloud(random_cloud(8, 3, seed=i), shape_label=i % 2, name='c%d' % i)
            for i in range(5)]
  ds = Dataset(clouds, ['a', 'b'], {'train': ['c0', 'c1', 'c2'], 'test': ['c3', 'c4']})
  assert len(ds.split('test')) == 2 and ds.d == 3
  equal(ds.shape_labels(), numpy.array([0, 1, 0, 1, 0]))
  batch = ds.batch([1, 3])
  assert batch.features.shape == (2, 8, 3) and batch.point_labels is None
  assert [len(b.indices) for b in ds.batches(2)] == [2, 2, 1]
  raises(DataError, ds.split, 'val')
  raises(DataError, Dataset, clouds, splits={'train': ['c9']})
  raises(DataError, Dataset, clouds + [PointCloud(numpy.zeros((2, 3)), name='c0')])
  raises(DataError, Dataset, [clouds[0], PointCloud(numpy.zeros((8, 6)))])
  raises(DataError, Dataset(clouds + [PointCloud(numpy.zeros((2, 3)))]).batch, [0, 5])

def test_synthetic_shapes():
  for name in generators:
    pc = sample_shape(name, 200, seed=1, with_normals=True)
    assert pc.features.shape == (200, 6)
    equal(numpy.max(numpy.linalg.norm(pc.xyz, axis=1)), 1., tol=1e-12)
    equal(numpy.linalg.norm(pc.normals, axis=1), numpy.ones(200), tol=1e-9)
  mug = sample_shape('mug', 300, seed=0)
  assert set(mug.point_labels) == set([0, 1])
  raises(ConfigError, sample_shape, 'teapot', 10)

def test_sphere_without_noise():
  pc = sample_shape('sphere', 100, seed=2, jitter=0., normalize=False)
  equal(numpy.linalg.norm(pc.xyz, axis=1), numpy.ones(100), tol=1e-12)

def test_torus_surface():
  pc = sample_shape('torus', 500, seed=3, jitter=0., rotate=False, normalize=False,
                    with_normals=True)
  ring = numpy.linalg.norm(pc.xyz[:, :2], axis=1)
  equal((ring - 1.)**2 + pc.xyz[:, 2]**2, numpy.full(500, 0.35**2), tol=1e-12)
  equal(numpy.linalg.norm(pc.normals, axis=1), numpy.ones(500), tol=1e-12)
  ds = make_dataset(train=1, test=1, n_points=32)
  assert ds.class_names == ['sphere', 'cube', 'cylinder', 'torus'] and len(ds) == 8

def test_synthetic_datasets():
  clouds = gen_synthetic(['sphere', 'mug'], counts=[2, 3], n_points=32, seed=7)
  assert [pc.shape_label for pc in clouds] == [0, 0, 1, 1, 1]
  assert all(pc.point_labels is not None for pc in clouds)
  again = gen_synthetic(['sphere', 'mug'], counts=[2, 3], n_points=32, seed=7)
  assert all(a == b for a, b in zip(clouds, again))
  raises(ConfigError, gen_synthetic, ['sphere'], counts=[1, 2])
  ds = make_dataset(['cube', 'torus'], train=3, test=2, n_points=16, seed=1)
  assert [len(ds.splits[s]) for s in ['train', 'test']] == [6, 4]
  assert ds.parts is None
  assert len(set(pc.name for pc in ds)) == 10
  with_val = make_dataset(['cube', 'torus'], train=3, test=2, n_points=16, seed=1, val=1)
  assert list(with_val.splits) == ['train', 'val', 'test'] and len(with_val) == 12
  assert all(a == b for a, b in zip(with_val.split('test'), ds.split('test')))
  assert not set(with_val.splits['val']) & set(ds.splits['test'])
  ds = make_dataset(['sphere', 'mug'], train=1, test=1, n_points=16)
  assert ds.category_parts() == {0: [0], 1: [0, 1]}
