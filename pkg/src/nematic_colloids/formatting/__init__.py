"""
nematic-colloids formatting package for text reports.
"""

from .theme import ColloidTheme
from .formatters import ColloidFormatters
from .templates import ColloidTemplates
from .components import ColloidComponents

__all__ = [
    'ColloidTheme',
    'ColloidFormatters',
    'ColloidTemplates',
    'ColloidComponents'
]
