#!/usr/bin/env python
from setuptools import find_packages, setup

with open('README.rst', 'r') as fh:
  # Remove header
  for line in fh:
    if 'POINTKAN' in line:
      next(fh)
      break

  long_description = fh.read()


setup(
  name='pointkan',
  packages=find_packages(exclude=['examples', 'examples.*']),
  include_package_data=True,
  package_data={'pointkan': ['test/*/*.py']},
  version='0.1.0',
  license='lgpl-3.0',
  description='Point-cloud classification and segmentation with Jacobi-polynomial KAN layers',
  long_description=long_description,
  long_description_content_type='text/x-rst',
  classifiers=[
      'Development Status :: 3 - Alpha',
      'Operating System :: OS Independent',
      'License :: OSI Approved :: '
      'GNU Lesser General Public License v3 or later (LGPLv3+)',
      'Programming Language :: Python :: 3',
      'Topic :: Scientific/Engineering :: Artificial Intelligence',
      'Topic :: Scientific/Engineering :: Image Recognition'
  ],
  entry_points={'console_scripts': ['pointkan = pointkan.main:run_standalone']},
  python_requires='>=3.6',
  install_requires=['numpy', 'scipy', 'h5py', 'setuptools'],
)
