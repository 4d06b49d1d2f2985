"""
Command-line surface: gen, run, validate and bench
"""

from .main import create_parser

__all__ = ["create_parser"]
