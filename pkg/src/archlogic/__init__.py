"""Syntax, finite models, oracles and reductions for fragments of field theories."""

from .coding import godel_code, godel_decode
from .fragments import FragmentDescriptor, classify, parse_fragment
from .logic import L_RING, L_VAL, L_VAL_VARPI, parse_sentence, print_canonical
from .models import evaluate
from .oracles import OracleAnswer

__version__ = "0.1.0"

__all__ = [
    "FragmentDescriptor", "L_RING", "L_VAL", "L_VAL_VARPI", "OracleAnswer", "classify",
    "evaluate", "godel_code", "godel_decode", "parse_fragment", "parse_sentence",
    "print_canonical",
]
