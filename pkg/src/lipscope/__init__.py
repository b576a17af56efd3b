"""Lipschitz-constant bounds and random matrix estimates for
fully-connected deep networks.
"""

__version__: str = '0.1.0'
"""The version of the package, embedded in every output record."""
