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
"""A file that specifies how to install the sbmcov tools."""

import os
from setuptools import setup


this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(name='sbmcov',
      version='0.1',
      description='Spectral community detection in blockmodels with a '
      'vertex covariate',
      classifiers=[
          'Programming Language :: Python :: 3',
          'License :: OSI Approved :: Apache Software License',
          'Topic :: Scientific/Engineering :: Mathematics',
      ],
      python_requires='>=3.8',
      license='Apache License 2.0',
      long_description=long_description,
      long_description_content_type='text/markdown',
      author='sbmcov Developers',
      packages=['sbmcov'],
      package_dir={'sbmcov': 'tools'},
      install_requires=[
          'numpy>=1.20',
          'scipy>=1.6',
          'scikit-learn>=0.24',
      ],
      entry_points={
          'console_scripts': [
              'sbmcov = sbmcov.run_sbmcov:main',
          ],
      },
)
