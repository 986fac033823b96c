"""Finite binary trees with subtree and substitution, and reductions into their theory."""

from .trees import BACKEND, LEAF, Tree, node, parse_tree, render_tree, substitute, subterm

__all__ = ["BACKEND", "LEAF", "Tree", "node", "parse_tree", "render_tree", "substitute", "subterm"]
__version__ = "0.1.0"
