"""PAM constellations with Gray labels, AWGN, demapping and exact LLRs.

Amplitudes are equally spaced and scaled to unit symbol energy. Labels follow
the binary reflected Gray code, most significant bit first, so adjacent points
differ in one bit. SNR is 1/N0 and the channel adds real Gaussian noise of
variance N0 per sample, so 2-PAM sees a raw bit error rate of Q(sqrt(SNR)).
LLRs use the exp(-(y-s)^2/N0) bit metric (full log-sum-exp over the point
sets); the marking thresholds used by the decoder are calibrated against this
scale, so both conventions must move together if either is ever changed.
Positive LLR favors bit 1; the hard demapper agrees with the LLR sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp


@dataclass(frozen=True, eq=False)
class Constellation:
    m: int
    points: np.ndarray = field(init=False)
    labels: np.ndarray = field(init=False)
    label_to_index: np.ndarray = field(init=False)
    label_bits: np.ndarray = field(init=False)
    mids: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        M = 1 << self.m
        scale = np.sqrt(3.0 / (M * M - 1))
        points = (2 * np.arange(M) - (M - 1)) * scale
        labels = np.arange(M) ^ (np.arange(M) >> 1)
        inv = np.zeros(M, dtype=np.int64)
        inv[labels] = np.arange(M)
        shifts = np.arange(self.m - 1, -1, -1)
        bits = ((labels[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels.astype(np.int64))
        object.__setattr__(self, "label_to_index", inv)
        object.__setattr__(self, "label_bits", bits)
        object.__setattr__(self, "mids", (points[:-1] + points[1:]) / 2)

    @property
    def M(self) -> int:
        return 1 << self.m

    def point_set(self, k: int, b: int) -> np.ndarray:
        """Indices of the points whose k-th label bit (MSB first) is b."""
        return np.nonzero(self.label_bits[:, k] == b)[0]


def pam_gray(m: int) -> Constellation:
    return Constellation(m)


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    noise_seed: int = 0

    @property
    def n0(self) -> float:
        return float(10.0 ** (-self.snr_db / 10.0))


def map_symbols(cons: Constellation, bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 1 or bits.size % cons.m:
        raise ValueError(f"bit count must be a multiple of m={cons.m}")
    groups = bits.reshape(-1, cons.m).astype(np.int64)
    weights = 1 << np.arange(cons.m - 1, -1, -1, dtype=np.int64)
    patterns = groups @ weights
    return cons.points[cons.label_to_index[patterns]]


def transmit(symbols, cfg: ChannelConfig) -> np.ndarray:
    """Add AWGN of variance N0; a fresh generator per call, so the same
    (symbols, cfg) always gives the same output."""
    rng = np.random.default_rng(cfg.noise_seed)
    x = np.asarray(symbols, dtype=np.float64)
    return x + rng.normal(0.0, np.sqrt(cfg.n0), x.shape)


class Channel:
    """Stateful variant for streaming use: consecutive calls draw consecutive
    noise samples from one seeded generator."""

    def __init__(self, snr_db: float, seed):
        self.n0 = float(10.0 ** (-snr_db / 10.0))
        self._sigma = np.sqrt(self.n0)
        self._rng = np.random.default_rng(seed)

    def transmit(self, symbols) -> np.ndarray:
        x = np.asarray(symbols, dtype=np.float64)
        return x + self._rng.normal(0.0, self._sigma, x.shape)


def hd_demap(cons: Constellation, y) -> np.ndarray:
    """Labels of the nearest point for each sample, flattened to a bit array.
    Boundary samples go to the lower-amplitude point."""
    y = np.asarray(y, dtype=np.float64)
    idx = np.searchsorted(cons.mids, y, side="left")
    return cons.label_bits[idx].reshape(y.shape + (cons.m,)).reshape(-1)


def llr(cons: Constellation, y, n0: float) -> np.ndarray:
    """Exact per-bit LLRs, shape (len(y), m); positive favors bit 1."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if cons.m == 1:
        lam = (4.0 * cons.points[1] / n0) * y
        return lam[:, None]
    metric = -((y[:, None] - cons.points[None, :]) ** 2) / n0
    out = np.empty((y.size, cons.m), dtype=np.float64)
    for k in range(cons.m):
        ones = cons.label_bits[:, k] == 1
        out[:, k] = (logsumexp(metric[:, ones], axis=1)
                     - logsumexp(metric[:, ~ones], axis=1))
    return out
