"""Contraction loss of directed interconnection topologies and network motifs."""

__version__ = "0.1.0"
