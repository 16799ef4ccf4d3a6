# -*- coding: utf-8 -*-
'''
setup.py

installation script

'''
from pathlib import Path
from setuptools import setup, find_packages


long_description = (Path(__file__).parent / 'README.md').read_text()


def run():
    setup(
        name='pyranders',
        version='0.1',
        description='extensible numpy-based toolkit for the Funk, Finsler-Poincare disk and half-plane Randers models',
        long_description=long_description,
        long_description_content_type='text/markdown',
        author='Eric Truett',
        author_email='sansbacon@gmail.com',
        license='MIT',
        packages=find_packages(exclude=('tests',)),
        install_requires=[
            'numpy',
            'numpy-indexed',
            'pandas',
            'scipy',
            'stevedore',
        ],
        extras_require={
            'dev': ['pytest'],
            'docs': ['mkdocs', 'mkdocs-material', 'mkdocstrings'],
        },
        entry_points={
          'pyranders.metric': ['funk = pyranders.metric:FunkMetric',
                               'pdisk = pyranders.metric:PoincareDiskMetric',
                               'hplane = pyranders.metric:HalfPlaneMetric',
                               ],
          'pyranders.isometry': ['f = pyranders.isometry:PoincareToFunk',
                                 'f_inv = pyranders.isometry:FunkToPoincare',
                                 'g = pyranders.isometry:FunkToHalfPlane',
                                 'g_inv = pyranders.isometry:HalfPlaneToFunk',
                                 'h = pyranders.isometry:HalfPlaneToPoincare',
                                 'h_inv = pyranders.isometry:PoincareToHalfPlane',
                                 ],
          'pyranders.mesh': ['disk = pyranders.mesh:DiskMesher',
                             'rectangle = pyranders.mesh:RectangleMesher',
                             'hyperbolic_disk = pyranders.mesh:HyperbolicDiskMesher',
                             ],
          'console_scripts': ['pyranders = pyranders.app.app:main'],
        },
        zip_safe=False,
        classifiers=[
            'Programming Language :: Python :: 3',
            'License :: OSI Approved :: MIT License',
            'Operating System :: OS Independent',
        ],
        python_requires='>=3.8',
    )


if __name__ == '__main__':
    run()
