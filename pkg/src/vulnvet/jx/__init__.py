"""Frontend for the JX subject language: parsing, printing, name resolution."""

from .ast import SourceUnit
from .errors import JxError, ParseError, ResolutionError
from .parser import parse_unit
from .printer import pretty_print
from .resolver import ResolvedProgram, resolve

__all__ = [
    "JxError",
    "ParseError",
    "ResolutionError",
    "ResolvedProgram",
    "SourceUnit",
    "parse_unit",
    "pretty_print",
    "resolve",
]
