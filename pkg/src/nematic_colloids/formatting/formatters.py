"""
Core formatting functions for nematic-colloids output.
"""
import math
from typing import Iterable, Sequence

import numpy as np

from .theme import ColloidTheme


class ColloidFormatters:
    """Number, matrix and status formatting shared by all reports."""

    @staticmethod
    def format_float(value: float, digits: int = 6) -> str:
        """Scientific notation with a fixed number of digits; nan and inf spelled out.

        Args:
            value: Number to format
            digits: Digits after the decimal point

        Returns:
            Formatted string, e.g. "1.234568e-03"
        """
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{digits}e}"

    @staticmethod
    def format_vector(values: Iterable[float], digits: int = 6) -> str:
        return "[" + ", ".join(ColloidFormatters.format_float(v, digits) for v in values) + "]"

    @staticmethod
    def format_matrix(matrix: Sequence[Sequence[float]], digits: int = 6, indent: str = "  ") -> str:
        """One bracketed row per line."""
        rows = np.asarray(matrix, dtype=float)
        return "\n".join(indent + ColloidFormatters.format_vector(row, digits) for row in rows)

    @staticmethod
    def format_duration(seconds: float) -> str:
        if seconds < 1.0:
            return f"{seconds * 1000.0:.1f} ms"
        minutes, rest = divmod(seconds, 60.0)
        return f"{int(minutes)}m {rest:.1f}s" if minutes else f"{rest:.2f} s"

    @staticmethod
    def format_status(status: str) -> str:
        return f"{ColloidTheme.get_status_marker(status)} {status.upper()}"

    @staticmethod
    def format_check(passed: bool) -> str:
        return ColloidFormatters.format_status("pass" if passed else "fail")
