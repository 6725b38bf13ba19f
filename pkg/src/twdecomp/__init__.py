"""Treewidth-preserving graph decompositions with checkable certificates."""

__version__ = "0.1.0"
