"""Constructive realization of a finite group as the automizer of a
homocyclic abelian subgroup inside a finite perfect group, with
machine-checkable certificates."""

__version__ = "0.1.0"
