"""Interleaved Reed-Solomon / polar concatenated codes."""

__version__ = "0.1.0"
