"""Type checking, unification and program equivalence for atomic System F."""

__version__ = "0.1.0"
