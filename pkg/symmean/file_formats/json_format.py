"""
Module containing the logic for loading and saving JSON matrix files and writing JSON traces and reports.

.. module:: json_format
   :synopsis:
"""
import json
import logging
import math
import pathlib
from typing import Any, Dict, List, Optional

import numpy as np

from symmean.file_formats.base import BaseFileFormat, BaseFileReader, BaseFileWriter, ParseError
from symmean.spd_core import SpdMatrix, validate_spd
from symmean.utils import format_real

ASYMMETRY_WARNING_TOL: float = 1e-9


class JSONMatrixReader(BaseFileReader):
    """Class containing the logic for loading {"dim", "data", "label"} matrix files."""

    LOGGER = logging.getLogger(__name__)

    @classmethod
    def load(cls, *args: Any, source_file: str = '', **kwargs: Any) -> SpdMatrix:
        """
        Loads a matrix file from disk and validates it.

        :param source_file: File to load from disk
        :type source_file: str
        :return: Validated matrix with the file's label
        :rtype: SpdMatrix
        :raises: ParseError, NotPositiveDefinite
        """
        source_path = pathlib.Path(source_file)
        if not source_path.is_file():
            raise ParseError(source_file, 'file not found')
        try:
            text = source_path.read_text(encoding='utf-8')
        except (OSError, UnicodeDecodeError) as error:
            raise ParseError(source_file, f'could not read file ({error})') from error
        return cls.loads(text, source_file)

    @classmethod
    def loads(cls, text: str, source_name: str = '<string>') -> SpdMatrix:
        """
        Parses the text of a matrix file.

        :param text: JSON document
        :type text: str
        :param source_name: Name used in error messages
        :type source_name: str
        :return: Validated matrix
        :rtype: SpdMatrix
        :raises: ParseError, NotPositiveDefinite
        """
        try:
            document = json.loads(text)
        except json.JSONDecodeError as error:
            raise ParseError(source_name, error.msg, error.lineno) from error
        if not isinstance(document, dict):
            raise ParseError(source_name, 'top level must be an object')

        dim = document.get('dim')
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ParseError(source_name, f'"dim" must be a positive integer, got {dim!r}')
        data = document.get('data')
        if not isinstance(data, list):
            raise ParseError(source_name, '"data" must be a list of reals')
        if len(data) != dim * dim:
            raise ParseError(source_name, f'"data" has {len(data)} entries, expected {dim * dim}')
        for index, value in enumerate(data):
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParseError(source_name, f'"data"[{index}] is not a finite real: {value!r}')
        label = document.get('label')
        if label is not None and not isinstance(label, str):
            raise ParseError(source_name, '"label" must be a string')

        raw = np.array(data, dtype=float).reshape(dim, dim)
        asymmetry = float(np.linalg.norm(raw - raw.T, 'fro'))
        magnitude = max(float(np.linalg.norm(raw, 'fro')), np.finfo(float).tiny)
        if asymmetry > ASYMMETRY_WARNING_TOL * magnitude:
            cls.LOGGER.warning('%s is not symmetric (relative asymmetry %.3e); using (M + M^T) / 2',
                               source_name, asymmetry / magnitude)
        matrix = validate_spd(raw)
        matrix.label = label
        return matrix


class JSONMatrixWriter(BaseFileWriter):
    """Class containing the logic for saving matrices in the JSON matrix format."""

    @classmethod
    def dump(cls, matrix: SpdMatrix, *args: Any, target_file: str = '', **kwargs: Any) -> None:  # type: ignore
        """
        Writes a matrix file to disk.

        :param matrix: Matrix to write
        :type matrix: SpdMatrix
        :param target_file: Destination file
        :type target_file: str
        """
        pathlib.Path(target_file).write_text(cls.dumps(matrix) + '\n', encoding='utf-8')

    @classmethod
    def dumps(cls, matrix: SpdMatrix, label: Optional[str] = None) -> str:
        """
        Serializes a matrix with 17 significant digits per entry.

        :param matrix: Matrix to serialize
        :type matrix: SpdMatrix
        :param label: Label overriding the matrix's own
        :type label: str
        :return: JSON document
        :rtype: str
        """
        data = ', '.join(format_real(value) for value in matrix.entries.ravel())
        text = f'{{"dim": {matrix.dim}, "data": [{data}]'
        final_label = label if label is not None else matrix.label
        if final_label is not None:
            text += f', "label": {json.dumps(final_label)}'
        return text + '}'


class JSONMatrixFormat(BaseFileFormat, JSONMatrixReader, JSONMatrixWriter):
    """Class containing the logic for loading and saving JSON matrix files."""


class JSONReportWriter(BaseFileWriter):
    """Class containing the logic for saving traces and reports as JSON."""

    @classmethod
    def dump(cls, payload: Dict[str, Any], *args: Any, target_file: str = '', **kwargs: Any) -> None:  # type: ignore
        """
        Writes a trace or report dictionary to disk.

        :param payload: Result of an as_dict() call
        :type payload: dict
        :param target_file: Destination file
        :type target_file: str
        """
        pathlib.Path(target_file).write_text(cls.dumps(payload) + '\n', encoding='utf-8')

    @classmethod
    def dumps(cls, payload: Dict[str, Any]) -> str:
        """
        Serializes a trace or report dictionary with sorted keys.

        :param payload: Result of an as_dict() call
        :type payload: dict
        :return: JSON document
        :rtype: str
        """
        return json.dumps(payload, indent=2, sort_keys=True)


def parse_matrix_file(path: str) -> SpdMatrix:
    """
    Reads and validates one matrix file.

    :param path: File path
    :type path: str
    :return: Validated matrix, label preserved
    :rtype: SpdMatrix
    :raises: ParseError, NotPositiveDefinite
    """
    return JSONMatrixFormat.load(source_file=path)


def parse_matrix_files(paths: List[str]) -> List[SpdMatrix]:
    """Reads several matrix files in order."""
    return [parse_matrix_file(path) for path in paths]
