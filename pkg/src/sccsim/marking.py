"""Reliability marking of channel bits from |LLR| magnitudes.

Each bit gets exactly one of three marks. With two thresholds d1 >= d2:
highly reliable (HRB) when |llr| >= d1, highly unreliable (HUB) when
|llr| < d2, unmarked otherwise. A one-threshold rule splits every bit
into HRB/HUB at d3. Marks are computed once per block on entry to the
decoding window; the LLRs themselves are then discarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import HRB, HUB, UB

__all__ = ["UB", "HRB", "HUB", "TwoThreshold", "OneThreshold", "mark"]


@dataclass(frozen=True)
class TwoThreshold:
    """HRB iff |llr| >= delta1, HUB iff |llr| < delta2, else unmarked."""

    delta1: float
    delta2: float

    def __post_init__(self):
        if not (self.delta1 >= self.delta2 >= 0.0):
            raise ValueError("need delta1 >= delta2 >= 0")


@dataclass(frozen=True)
class OneThreshold:
    """HRB iff |llr| >= delta3, HUB otherwise (no unmarked bits)."""

    delta3: float

    def __post_init__(self):
        if self.delta3 < 0.0:
            raise ValueError("delta3 must be >= 0")


def mark(abs_llr: np.ndarray, rule) -> np.ndarray:
    """Map |LLR| magnitudes to marks under the given threshold rule."""
    a = np.asarray(abs_llr, dtype=np.float64)
    if np.any(a < 0):
        raise ValueError("abs_llr must be non-negative")
    if isinstance(rule, TwoThreshold):
        out = np.full(a.shape, UB, dtype=np.uint8)
        out[a >= rule.delta1] = HRB
        out[a < rule.delta2] = HUB
        return out
    if isinstance(rule, OneThreshold):
        return np.where(a >= rule.delta3, HRB, HUB).astype(np.uint8)
    raise TypeError(f"unknown marking rule: {rule!r}")
