"""
Module containing classes for enumerated values.

.. module:: enums
   :synopsis:
"""


class KernelKind:
    """Enumeration class to indicate the two-variable symmetric means available."""

    ARITHMETIC: str = 'arithmetic'
    HARMONIC: str = 'harmonic'
    GEOMETRIC: str = 'geometric'
    LOGARITHMIC: str = 'logarithmic'
    GENERATOR: str = 'generator'
    K_FAMILY: str = 'kfamily'
    SQUARE: str = 'square'


class IterationMethod:
    """Enumeration class to indicate the n-variable symmetrization procedures."""

    ALM: str = 'ALM'
    BMP: str = 'BMP'

    @classmethod
    def parse(cls, value: str) -> str:
        """
        Normalizes a method name given in any case.

        :param value: Method name, e.g. "alm" or "BMP"
        :type value: str
        :return: Canonical method name
        :rtype: str
        """
        normalized = value.strip().upper()
        if normalized not in (cls.ALM, cls.BMP):
            raise ValueError(f'Unknown iteration method "{value}", expected alm or bmp.')
        return normalized


class MetricKind:
    """Enumeration class to indicate which distance a MetricValue holds."""

    EUCLID: str = 'euclid'
    PULLBACK: str = 'pullback'
    R_MULTIPLICATIVE: str = 'r_multiplicative'


class CheckName:
    """Enumeration class to indicate the verification checks exposed on the command line."""

    SANDWICH: str = 'sandwich'
    TRACE_INEQUALITY: str = 'trace-ineq'
    CENTROID: str = 'centroid'
    ORDER: str = 'order'
    B2: str = 'b2'
    LYAPUNOV: str = 'lyapunov'

    ALL = (SANDWICH, TRACE_INEQUALITY, CENTROID, ORDER, B2, LYAPUNOV)
