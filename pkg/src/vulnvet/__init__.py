"""Code-centric dependency vulnerability analysis for the JX language."""

__version__ = "0.1.0"
