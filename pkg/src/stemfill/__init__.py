"""Fast reconstruction of partially sampled spectrum-images."""

__version__ = "0.1.0"
