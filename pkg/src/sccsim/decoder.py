"""Sliding-window staircase decoders.

Both decoders iterate over the resident block pairs newest to oldest, run one
bounded-distance decode per component word, and slide after a fixed number of
iterations. The standard decoder accepts every decode. The bit-marking decoder
treats the oldest k_plain pairs the same way but guards the remaining pairs
with a mark/flag miscorrection check and retries rejected or failed words by
flipping highly-unreliable bits.

Within one pair all rows are decoded against the window contents as they stood
when the pair was entered (rows touch disjoint bits, and the flag check reads
a per-pair snapshot), so row order does not affect results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from ._kernels import HRB, NSTATS
from .scc import SccParams

STAT_NAMES = ("visits", "bdd_calls", "words_corrected", "bits_changed",
              "rejects", "bf_tries", "bf_accepts", "bf_fails")


@dataclass(frozen=True)
class IsabmConfig:
    """Bit-marking decoder settings: k_plain pairs of plain decoding at the
    old end of the window, the rest guarded; flip_seed keys HUB selection."""

    k_plain: int = 2
    flip_seed: int = 0

    def __post_init__(self):
        if self.k_plain < 0:
            raise ValueError("k_plain must be >= 0")
        if not 0 <= self.flip_seed < 2**64:
            raise ValueError("flip_seed must fit in 64 bits")


class WindowState:
    """Decoding window: L resident blocks, per-pair syndrome caches, marks,
    flags and retry counters. Block slot 0 is the oldest."""

    def __init__(self, params: SccParams, config: IsabmConfig | None = None):
        if config is not None and config.k_plain > params.window - 2:
            raise ValueError("k_plain must leave at least one guarded pair")
        self.params = params
        self.config = config
        L, w = params.window, params.w
        code = params.code
        self.bits = np.zeros((L, w, w), dtype=np.uint8)
        self.marks = np.zeros((L, w, w), dtype=np.uint8)
        self.syn = np.zeros((L - 1, w, 2 * code.t + 1), dtype=np.int64)
        self.state = np.zeros((L - 1, w), dtype=np.uint8)
        self.errw = np.zeros((L - 1, w), dtype=np.int8)
        self.errpos = np.zeros((L - 1, w, 5), dtype=np.int16)
        self.flags = np.zeros((L - 1, w), dtype=np.uint8)
        self.attempts = np.zeros((L - 1, w), dtype=np.int32)
        self.stats = np.zeros(NSTATS, dtype=np.int64)
        self.indices = [0]
        self.marks[0] = HRB
        self.n_filled = 1
        self.window_idx = 0
        self._next_index = 1

    @property
    def full(self) -> bool:
        return self.n_filled == self.params.window

    def admit(self, block: np.ndarray, marks: np.ndarray | None = None) -> None:
        w = self.params.w
        if self.full:
            raise RuntimeError("window already full; slide first")
        block = np.ascontiguousarray(block, dtype=np.uint8)
        if block.shape != (w, w):
            raise ValueError(f"block must be {w}x{w}")
        slot = self.n_filled
        self.bits[slot] = block
        if marks is None:
            self.marks[slot] = 0
        else:
            marks = np.ascontiguousarray(marks, dtype=np.uint8)
            if marks.shape != (w, w):
                raise ValueError(f"marks must be {w}x{w}")
            self.marks[slot] = marks
        self.state[slot - 1] = K.ST_DIRTY
        self.indices.append(self._next_index)
        self._next_index += 1
        self.n_filled += 1

    def iterate(self, isabm: bool) -> int:
        code = self.params.code
        cfg = self.config
        if isabm and cfg is None:
            raise ValueError("bit-marking iteration needs an IsabmConfig")
        k_plain = cfg.k_plain if (isabm and cfg is not None) else 0
        seed = np.uint64(cfg.flip_seed) if (isabm and cfg is not None) else np.uint64(0)
        return int(K.window_iteration(
            self.bits, self.marks, self.syn, self.state, self.errw,
            self.errpos, self.flags, self.attempts,
            np.int64(self.n_filled), np.int64(k_plain),
            np.int64(1 if isabm else 0), np.uint64(self.window_idx), seed,
            np.int64(code.t), np.int64(code.u), np.int64(code.n),
            np.int64(code.nc), np.int64(self.params.w), np.int64(code.d0),
            code.tables.log, code.tables.alog, code.pow_syn, self.stats))

    def process(self, isabm: bool) -> int:
        """Run up to `iters` iterations; stop early at a proven fixed point
        (nothing changed and no randomized retry was drawn)."""
        total = 0
        for _ in range(self.params.iters):
            tries_before = int(self.stats[K.S_BF_TRIES])
            ch = self.iterate(isabm)
            total += ch
            if ch == 0 and int(self.stats[K.S_BF_TRIES]) == tries_before:
                break
        return total

    def emit_oldest(self) -> tuple[int, np.ndarray]:
        return self.indices[0], self.bits[0].copy()

    def slide(self) -> None:
        """Drop the oldest block, shift everything down one slot, clear flags
        and retry counters, and mark the vacated newest pair dirty."""
        n = self.n_filled
        if n < 2:
            raise RuntimeError("nothing to slide")
        self.bits[:n - 1] = self.bits[1:n]
        self.marks[:n - 1] = self.marks[1:n]
        self.syn[:n - 2] = self.syn[1:n - 1]
        self.state[:n - 2] = self.state[1:n - 1]
        self.errw[:n - 2] = self.errw[1:n - 1]
        self.errpos[:n - 2] = self.errpos[1:n - 1]
        self.flags[:] = 0
        self.attempts[:] = 0
        self.indices.pop(0)
        self.n_filled = n - 1
        self.window_idx += 1

    def stats_dict(self) -> dict[str, int]:
        return {k: int(v) for k, v in zip(STAT_NAMES, self.stats)}


class StreamDecoder:
    """Streaming wrapper: push received blocks, collect decoded blocks as the
    window advances, flush the tail with shrinking windows."""

    def __init__(self, params: SccParams, config: IsabmConfig | None = None):
        self.ws = WindowState(params, config)
        self.isabm = config is not None

    def push(self, block: np.ndarray,
             marks: np.ndarray | None = None) -> list[tuple[int, np.ndarray]]:
        self.ws.admit(block, marks)
        out: list[tuple[int, np.ndarray]] = []
        if self.ws.full:
            self.ws.process(self.isabm)
            idx, blk = self.ws.emit_oldest()
            if idx > 0:
                out.append((idx, blk))
            self.ws.slide()
        return out

    def flush(self) -> list[tuple[int, np.ndarray]]:
        out: list[tuple[int, np.ndarray]] = []
        ws = self.ws
        while ws.n_filled >= 2:
            ws.process(self.isabm)
            idx, blk = ws.emit_oldest()
            if idx > 0:
                out.append((idx, blk))
            ws.slide()
        if ws.n_filled == 1:
            idx, blk = ws.emit_oldest()
            if idx > 0:
                out.append((idx, blk))
            ws.indices.pop(0)
            ws.n_filled = 0
        return out

    def stats(self) -> dict[str, int]:
        return self.ws.stats_dict()


def decode_iteration(ws: WindowState) -> int:
    """One plain-decoding iteration over the window."""
    return ws.iterate(isabm=False)


def decode_window_isabm(ws: WindowState, config: IsabmConfig | None = None) -> int:
    """One guarded iteration; config may be supplied here if the window was
    built without one."""
    if config is not None:
        ws.config = config
    return ws.iterate(isabm=True)


def run_stream(params: SccParams, blocks, marks=None,
               config: IsabmConfig | None = None) -> list[np.ndarray]:
    """Decode a finite stream of received blocks (standard decoding when
    config is None). marks, if given, must align with blocks."""
    blocks = list(blocks)
    if len(blocks) < params.window:
        raise ValueError(f"stream must hold at least {params.window} blocks")
    if marks is None:
        marks = [None] * len(blocks)
    else:
        marks = list(marks)
        if len(marks) != len(blocks):
            raise ValueError("marks and blocks must align")
    dec = StreamDecoder(params, config)
    out: dict[int, np.ndarray] = {}
    for blk, mk in zip(blocks, marks):
        for idx, b in dec.push(blk, mk):
            out[idx] = b
    for idx, b in dec.flush():
        out[idx] = b
    return [out[i] for i in range(1, len(blocks) + 1)]
