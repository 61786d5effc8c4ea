"""
spectrasphere - Subspace SVDD one-class classification for hyperspectral scenes
"""
from .version import __version__

__all__ = ["__version__"]
