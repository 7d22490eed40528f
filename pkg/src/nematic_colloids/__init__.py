"""
nematic-colloids - homogenised Landau-de Gennes potentials for dilute nematic colloids.
"""

from typing import TYPE_CHECKING

__version__ = "0.1.0"
__all__ = ["ColloidToolkit"]

# Loaded lazily so that `python -m nematic_colloids.cli` does not import the
# toolkit twice.
if TYPE_CHECKING:  # for type checkers only
    from .toolkit import ColloidToolkit  # pragma: no cover


def __getattr__(name):
    if name == "ColloidToolkit":
        from .toolkit import ColloidToolkit as _ColloidToolkit

        return _ColloidToolkit
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
