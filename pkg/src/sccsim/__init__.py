"""Staircase-code FEC simulator with soft-aided bit-marking decoding.

Subpackages cover the component-code algebra (gf_bch), the staircase frame
layout (scc), PAM modulation and the AWGN channel (modem), reliability
marking (marking), window decoders (decoder), the Monte Carlo harness
(harness) and information-rate / fiber-reach analysis (air).
"""

__version__ = "0.1.0"

from .gf_bch import BchCode, BddResult, bdd_decode, build_code, encode, syndromes
from .marking import HRB, HUB, UB, OneThreshold, TwoThreshold, mark
from .scc import SccParams

__all__ = [
    "BchCode",
    "BddResult",
    "bdd_decode",
    "build_code",
    "encode",
    "syndromes",
    "HRB",
    "HUB",
    "UB",
    "OneThreshold",
    "TwoThreshold",
    "mark",
    "SccParams",
    "__version__",
]
