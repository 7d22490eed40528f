"""
Subcommand tools for nematic-colloids.
"""
from .design import DesignTools
from .minimize import MinimizeTools
from .moments import MomentTools
from .potential import PotentialTools
from .selftest import SelftestTools
from .sweep import SweepTools

__all__ = [
    "DesignTools",
    "MinimizeTools",
    "MomentTools",
    "PotentialTools",
    "SelftestTools",
    "SweepTools",
]
