"""Staircase frame layout and streaming encoder.

Blocks are w x w bit matrices with w = nc/2. Every row of [B_{i-1}^T  B_i]
is a codeword of the component code, so component word j of pair i is
column j of B_{i-1} followed by row j of B_i. Within that word, positions
0..w-1 are coupled bits, the next kc-w are fresh information and the final
nc-kc are parity. B_0 is all zeros and never transmitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .gf_bch import BchCode


@dataclass(frozen=True, eq=False)
class SccParams:
    """Staircase parameters: component code, window size L, iterations ell."""

    code: BchCode
    window: int = 9
    iters: int = 7
    w: int = field(init=False)
    rate: Fraction = field(init=False)

    def __post_init__(self):
        nc = self.code.nc
        if nc % 2:
            raise ValueError("component code length must be even (use u=1)")
        w = nc // 2
        if self.code.kc <= w:
            raise ValueError("kc must exceed nc/2 or rows carry no information")
        if self.window < 2:
            raise ValueError("window must hold at least one block pair")
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "rate", Fraction(2 * self.code.kc - nc, nc))

    @property
    def info_bits_per_block(self) -> int:
        return self.w * (self.code.kc - self.w)


def zero_block(params: SccParams) -> np.ndarray:
    return np.zeros((params.w, params.w), dtype=np.uint8)


def _g_low(code: BchCode) -> int:
    return code.generator ^ (1 << (code.nc - code.kc - code.u))


def encode_next_block(params: SccParams, prev: np.ndarray, info) -> np.ndarray:
    """Encode the next block from the previous one and w*(kc-w) info bits."""
    w = params.w
    kinfo = params.code.kc - w
    info = np.ascontiguousarray(info, dtype=np.uint8).reshape(w, kinfo)
    prev = np.ascontiguousarray(prev, dtype=np.uint8)
    if prev.shape != (w, w):
        raise ValueError(f"prev block must be {w}x{w}")
    out = np.empty((w, w), dtype=np.uint8)
    K.encode_block_rows(prev, info, _g_low(params.code),
                        params.code.nc - params.code.kc - params.code.u,
                        params.code.nc, params.code.u, out)
    return out


class SccEncoder:
    """Stateful streaming encoder; block indices start at 1 (B_0 implicit)."""

    def __init__(self, params: SccParams):
        self.params = params
        self._prev = zero_block(params)
        self.blocks_out = 0

    def push(self, info) -> np.ndarray:
        blk = encode_next_block(self.params, self._prev, info)
        self._prev = blk
        self.blocks_out += 1
        return blk


def extract_component_word(older: np.ndarray, newer: np.ndarray,
                           j: int) -> np.ndarray:
    """Word j of the pair: column j of the older block, then row j of the
    newer one."""
    w = older.shape[0]
    if not 0 <= j < w:
        raise IndexError(f"row {j} outside 0..{w - 1}")
    out = np.empty(2 * w, dtype=np.uint8)
    out[:w] = older[:, j]
    out[w:] = newer[j, :]
    return out


def write_component_word(older: np.ndarray, newer: np.ndarray, j: int,
                         word: np.ndarray) -> None:
    w = older.shape[0]
    if not 0 <= j < w:
        raise IndexError(f"row {j} outside 0..{w - 1}")
    older[:, j] = word[:w]
    newer[j, :] = word[w:]
