import os
from setuptools import find_packages, setup


def read(file_name):
    return open(os.path.join(os.path.dirname(__file__), file_name)).read()


setup(
    name='symmean',
    version='0.1.0',
    description='Kubo-Ando matrix means of positive definite matrices, their weighted forms, '
                'and ALM/BMP n-variable extensions',
    packages=find_packages(exclude=('tests',)),
    install_requires=['numpy>=1.24', 'scipy>=1.10'],
    entry_points={'console_scripts': ['symmean = symmean.cli:main']},
    license='MIT',
    keywords='matrix mean positive definite kubo-ando geometric mean alm bmp',
    long_description=read('README.md'),
    long_description_content_type='text/markdown',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
    ]
)
