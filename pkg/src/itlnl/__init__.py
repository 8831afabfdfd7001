"""Interval temporal logic with neighbourhood modalities: syntax, reference
semantics, automata, normal forms, inverse projection and quantifier
elimination."""
from .syntax import Formula, parse, render

__version__ = "0.1.0"

__all__ = ["Formula", "parse", "render", "__version__"]
