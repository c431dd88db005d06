"""Left-invariant spray geometry on Lie groups."""

__version__ = "0.1.0"
