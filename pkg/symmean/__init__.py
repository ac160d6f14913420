"""
Python package computing Kubo-Ando matrix means, their weighted forms and their ALM/BMP n-variable extensions.
"""
# flake8: noqa
from .diagnostics import *
from .enums import *
from .file_formats import *
from .mean_kernels import *
from .multivariate import *
from .spd_core import *
from .utils import *
from .weighted_means import *
