"""HyperLTL syntax, negation normal form, lasso semantics and prefix classification."""

from .classify import FragmentClass, classify, classify_prefix
from .nnf import is_nnf, negate_to_nnf, nnf, to_basis
from .parser import FormulaScopeError, FormulaSyntaxError, parse_body, parse_hyperltl
from .semantics import AlphabetMismatch, eval_on_lasso_traces, eval_on_lasso_word, zip_traces
from .syntax import (FALSE, TRUE, And, Atom, Body, Const, Eventually, Globally, HyperLTLFormula,
                     Implies, Next, Not, Or, Quantifier, Release, Until, atoms, depth, to_text, walk)

__all__ = [
    "FALSE", "TRUE", "AlphabetMismatch", "And", "Atom", "Body", "Const", "Eventually", "FormulaScopeError",
    "FormulaSyntaxError", "FragmentClass", "Globally", "HyperLTLFormula", "Implies", "Next", "Not", "Or",
    "Quantifier", "Release", "Until", "atoms", "classify", "classify_prefix", "depth", "eval_on_lasso_traces",
    "eval_on_lasso_word", "is_nnf", "negate_to_nnf", "nnf", "parse_body", "parse_hyperltl", "to_basis",
    "to_text", "walk", "zip_traces",
]
