"""Multi-parent recombination on finite type spaces and its equivalent forms."""

__version__ = "0.1.0"
