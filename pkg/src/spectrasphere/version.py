"""Version information for spectrasphere."""

__version__ = "0.1.0"
