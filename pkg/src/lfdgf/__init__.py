"""Guarded fragment <-> logic of functional dependence workbench."""

from .syntax import Signature, fo, lfd, parse_fo, parse_lfd

__version__ = "0.1.0"

__all__ = ["Signature", "fo", "lfd", "parse_fo", "parse_lfd"]
