"""Statement completion for the AJava subset language.

Combines an n-gram language model over abstracted token sequences with
program analysis (syntax rules, accessibility rules, Unknown-aware type
checking) to fill in the remainder of a partially typed code statement.
"""

__version__ = "0.1.0"
