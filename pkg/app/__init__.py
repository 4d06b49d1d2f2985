"""
Streaming eps-hull toolkit
Random-order, multipass and (eps, delta) coreset algorithms with exact oracles
"""

__version__ = "1.0.0"
__author__ = "Geometry Streams Team"
__description__ = "Streaming eps-hull algorithms, ground-truth oracles and benchmark harness"

# Package metadata
__all__ = [
    "__version__",
    "__author__",
    "__description__"
]
