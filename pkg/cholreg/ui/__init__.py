"""Command-line front end for the risk experiments."""
from .cli import CLI

__all__ = ["CLI"]
