"""Marked graph diagrams of surface-links, Yoshikawa moves and move search."""

from .diagram import Diagram, DiagramError, Vertex
from .mgdfile import parse, parse_tangle, serialize
from .canonical import canonical_code

__all__ = [
    "Diagram",
    "DiagramError",
    "Vertex",
    "parse",
    "parse_tangle",
    "serialize",
    "canonical_code",
]
