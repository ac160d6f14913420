"""
Module containing the base structure for matrix file loading and saving.

.. module:: base
   :synopsis:
"""
import abc
from typing import Any, Optional

from symmean.spd_core import MatrixMeanException, SpdMatrix


class ParseError(MatrixMeanException):
    """Raised when a matrix file is missing or malformed."""

    def __init__(self, path: str, detail: str, line: Optional[int] = None) -> None:
        location = f'{path}:{line}' if line is not None else path
        super().__init__(f'{location}: {detail}')
        self.path: str = path
        self.detail: str = detail
        self.line: Optional[int] = line


class BaseFileReader(abc.ABC):
    """Class used to define base structure for file loading."""

    @classmethod
    @abc.abstractmethod
    def load(cls, *args: Any, **kwargs: Any) -> SpdMatrix:
        """
        Method used to load a matrix file into memory.

        :param args: Method args
        :param kwargs: Method kwargs
        :return: Validated matrix
        :rtype: SpdMatrix
        """
        raise NotImplementedError


class BaseFileWriter(abc.ABC):
    """Class used to define base structure for file saving."""

    @classmethod
    @abc.abstractmethod
    def dump(cls, *args: Any, **kwargs: Any) -> None:
        """
        Method used to dump a matrix, trace or report from memory to disk.

        :param args: Method args
        :param kwargs: Method kwargs
        """
        raise NotImplementedError


class BaseFileFormat(BaseFileReader, BaseFileWriter, abc.ABC):
    """Class used to define base structure for matrix file loading and saving."""

    @classmethod
    def load(cls, *args: Any, **kwargs: Any) -> SpdMatrix:
        """Loads a matrix file through the concrete reader."""
        return super().load(*args, **kwargs)

    @classmethod
    def dump(cls, *args: Any, **kwargs: Any) -> None:
        """Dumps through the concrete writer."""
        super().dump(*args, **kwargs)
