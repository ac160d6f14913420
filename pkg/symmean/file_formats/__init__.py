"""
Module containing the readers and writers for matrix, trace and report files.

.. module:: file_formats
   :synopsis:
"""
from .base import *
from .json_format import *
