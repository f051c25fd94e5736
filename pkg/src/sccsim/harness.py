"""Seeded Monte Carlo BER experiments.

A run streams encoded blocks through the channel and decoder on independent
shards until a stop rule fires (enough post-FEC bit errors, or an info-bit
budget). Shards advance in fixed-size rounds and counters are folded in shard
order at round barriers, so results are bit-identical for a given spec no
matter how threads are scheduled. Seeds for the info, noise and flip streams
are spawned per shard from the master seed; they do not depend on the decoder
or thresholds, which keeps comparisons across configurations seed-paired.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from functools import lru_cache

import numpy as np

from .decoder import IsabmConfig, StreamDecoder
from .gf_bch import build_code
from .marking import OneThreshold, TwoThreshold, mark
from .modem import hd_demap, llr, map_symbols, pam_gray
from .scc import SccParams, encode_next_block, zero_block

CODES = {"C1": (8, 2), "C2": (8, 3), "C3": (8, 4)}

CSV_COLUMNS = ("code", "decoder", "M", "L", "K", "delta1", "delta2", "delta3",
               "snr_db", "pre_ber", "post_ber", "bits", "errors", "censored",
               "seed")


@lru_cache(maxsize=None)
def component_code(name: str):
    if name not in CODES:
        raise ValueError(f"unknown code {name!r}; choose from {sorted(CODES)}")
    nu, t = CODES[name]
    return build_code(nu, t, u=1)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce a BER experiment."""

    code: str = "C1"
    decoder: str = "isabm"
    pam_m: int = 1
    window: int = 9
    iters: int = 7
    k_plain: int = 2
    mark_mode: str = "two"
    delta1: float = 10.0
    delta2: float = 2.5
    delta3: float = 8.5
    snr_grid: tuple = ()
    min_errors: int = 100
    max_info_bits: int = 200_000_000
    shards: int = 8
    chunk_blocks: int = 6
    master_seed: int = 1

    def __post_init__(self):
        if self.code not in CODES:
            raise ValueError(f"unknown code {self.code!r}")
        if self.decoder not in ("standard", "isabm"):
            raise ValueError("decoder must be 'standard' or 'isabm'")
        if self.pam_m < 1:
            raise ValueError("pam_m must be >= 1")
        if self.window < 2:
            raise ValueError("window must be >= 2")
        if not 0 <= self.k_plain <= self.window - 2:
            raise ValueError("need 0 <= k_plain <= window-2")
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        if self.mark_mode not in ("two", "one"):
            raise ValueError("mark_mode must be 'two' or 'one'")
        if self.mark_mode == "two" and not self.delta1 >= self.delta2 >= 0:
            raise ValueError("need delta1 >= delta2 >= 0")
        if self.mark_mode == "one" and self.delta3 < 0:
            raise ValueError("delta3 must be >= 0")
        if self.min_errors < 1 or self.max_info_bits < 1:
            raise ValueError("stop rule must be positive")
        if self.shards < 1 or self.chunk_blocks < 1:
            raise ValueError("shards and chunk_blocks must be >= 1")
        object.__setattr__(self, "snr_grid",
                           tuple(float(s) for s in self.snr_grid))
        if list(self.snr_grid) != sorted(self.snr_grid):
            raise ValueError("snr_grid must be sorted ascending")

    @property
    def M(self) -> int:
        return 1 << self.pam_m

    @property
    def marked_blocks(self) -> int:
        return self.window - self.k_plain

    def mark_rule(self):
        if self.mark_mode == "two":
            return TwoThreshold(self.delta1, self.delta2)
        return OneThreshold(self.delta3)

    def scc_params(self) -> SccParams:
        return SccParams(component_code(self.code), self.window, self.iters)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BerRecord:
    code: str
    decoder: str
    M: int
    L: int
    K: int
    delta1: float
    delta2: float
    delta3: float
    snr_db: float
    pre_ber: float
    post_ber: float
    bits: int
    errors: int
    censored: bool
    seed: int
    shards: int
    pre_bits: int
    pre_errors: int
    wall_time_s: float

    def csv_row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("wall_time_s")
        return d


class _ShardSim:
    """One independent encode/modulate/decode stream with its own seeds."""

    def __init__(self, spec: ExperimentSpec, snr_db: float, shard: int):
        self.spec = spec
        params = spec.scc_params()
        self.params = params
        self.w = params.w
        self.kinfo = params.code.kc - params.w
        self.cons = pam_gray(spec.pam_m)
        self.n0 = float(10.0 ** (-snr_db / 10.0))
        self.sigma = math.sqrt(self.n0)
        ss = np.random.SeedSequence(spec.master_seed, spawn_key=(shard,))
        info_ss, noise_ss, flip_ss = ss.spawn(3)
        self.info_rng = np.random.default_rng(info_ss)
        self.noise_rng = np.random.default_rng(noise_ss)
        self.isabm = spec.decoder == "isabm"
        cfg = None
        if self.isabm:
            flip_seed = int(flip_ss.generate_state(1, dtype=np.uint64)[0])
            cfg = IsabmConfig(spec.k_plain, flip_seed)
        self.rule = spec.mark_rule()
        self.dec = StreamDecoder(params, cfg)
        self.prev = zero_block(params)
        self.tx_blocks: dict[int, np.ndarray] = {}
        self.blocks_in = 0
        self.carry_tx = np.zeros(0, dtype=np.uint8)
        self.rx_bits = np.zeros(0, dtype=np.uint8)
        self.rx_llr = np.zeros(0, dtype=np.float64)
        self.pre_errors = 0
        self.pre_bits = 0
        self.post_errors = 0
        self.post_bits = 0

    def _through_channel(self, bits: np.ndarray, pad: int) -> None:
        """Modulate, add noise, demap; count pre-FEC errors on the real bits
        (trailing pad bits excluded) and queue hard bits plus |LLR|."""
        m = self.cons.m
        x = map_symbols(self.cons, bits)
        y = x + self.noise_rng.normal(0.0, self.sigma, x.shape)
        hd = hd_demap(self.cons, y)
        keep = hd.size - pad
        self.pre_errors += int(np.count_nonzero(hd[:keep] != bits[:keep]))
        self.pre_bits += keep
        self.rx_bits = np.concatenate([self.rx_bits, hd[:keep]])
        if self.isabm:
            mags = np.abs(llr(self.cons, y, self.n0)).reshape(-1)
            self.rx_llr = np.concatenate([self.rx_llr, mags[:keep]])

    def _take_emitted(self, emitted) -> None:
        k = self.kinfo
        for idx, blk in emitted:
            ref = self.tx_blocks.pop(idx)
            self.post_errors += int(np.count_nonzero(blk[:, :k] != ref))
            self.post_bits += self.w * k

    def advance(self, nblocks: int) -> None:
        w, k, m = self.w, self.kinfo, self.cons.m
        tx = np.empty(nblocks * w * w, dtype=np.uint8)
        for i in range(nblocks):
            info = self.info_rng.integers(0, 2, (w, k), dtype=np.uint8)
            blk = encode_next_block(self.params, self.prev, info)
            self.prev = blk
            self.blocks_in += 1
            self.tx_blocks[self.blocks_in] = blk[:, :k].copy()
            tx[i * w * w:(i + 1) * w * w] = blk.reshape(-1)
        stream = np.concatenate([self.carry_tx, tx])
        nsym = stream.size // m
        self.carry_tx = stream[nsym * m:]
        self._through_channel(stream[:nsym * m], pad=0)
        self._push_full_blocks()

    def _push_full_blocks(self) -> None:
        w = self.w
        nb = self.rx_bits.size // (w * w)
        for i in range(nb):
            blk = self.rx_bits[i * w * w:(i + 1) * w * w].reshape(w, w)
            marks = None
            if self.isabm:
                mags = self.rx_llr[i * w * w:(i + 1) * w * w].reshape(w, w)
                marks = mark(mags, self.rule)
            self._take_emitted(self.dec.push(blk, marks))
        self.rx_bits = self.rx_bits[nb * w * w:]
        if self.isabm:
            self.rx_llr = self.rx_llr[nb * w * w:]

    def finalize(self) -> None:
        if self.carry_tx.size:
            pad = (-self.carry_tx.size) % self.cons.m
            padded = np.concatenate(
                [self.carry_tx, np.zeros(pad, dtype=np.uint8)])
            self._through_channel(padded, pad=pad)
            self.carry_tx = np.zeros(0, dtype=np.uint8)
            self._push_full_blocks()
        self._take_emitted(self.dec.flush())


def run_point(spec: ExperimentSpec, snr_db: float) -> BerRecord:
    """Run one SNR point to the stop rule; deterministic for a given spec."""
    t0 = time.perf_counter()
    shards = [_ShardSim(spec, snr_db, s) for s in range(spec.shards)]
    with ThreadPoolExecutor(max_workers=spec.shards) as pool:
        while True:
            errors = sum(s.post_errors for s in shards)
            bits = sum(s.post_bits for s in shards)
            if errors >= spec.min_errors or bits >= spec.max_info_bits:
                break
            jobs = [pool.submit(s.advance, spec.chunk_blocks) for s in shards]
            for job in jobs:
                job.result()
        jobs = [pool.submit(s.finalize) for s in shards]
        for job in jobs:
            job.result()
    errors = sum(s.post_errors for s in shards)
    bits = sum(s.post_bits for s in shards)
    pre_errors = sum(s.pre_errors for s in shards)
    pre_bits = sum(s.pre_bits for s in shards)
    return BerRecord(
        code=spec.code, decoder=spec.decoder, M=spec.M, L=spec.window,
        K=spec.k_plain, delta1=spec.delta1, delta2=spec.delta2,
        delta3=spec.delta3, snr_db=float(snr_db),
        pre_ber=pre_errors / pre_bits if pre_bits else 0.0,
        post_ber=errors / bits if bits else 0.0,
        bits=bits, errors=errors, censored=errors < spec.min_errors,
        seed=spec.master_seed, shards=spec.shards, pre_bits=pre_bits,
        pre_errors=pre_errors, wall_time_s=time.perf_counter() - t0)


def sweep(spec: ExperimentSpec) -> list[BerRecord]:
    if not spec.snr_grid:
        raise ValueError("snr_grid is empty")
    return [run_point(spec, s) for s in spec.snr_grid]


def required_snr_at(records, target_ber: float) -> float | None:
    """Log-linear interpolation of the BER-vs-SNR curve at target_ber; None
    when no adjacent pair of positive-BER points brackets the target."""
    pts = sorted((r.snr_db, r.post_ber) for r in records)
    for (s0, b0), (s1, b1) in zip(pts, pts[1:]):
        if b0 <= 0 or b1 <= 0:
            continue
        if b0 >= target_ber >= b1:
            if b0 == b1:
                return s0
            frac = (math.log(b0) - math.log(target_ber)) \
                / (math.log(b0) - math.log(b1))
            return s0 + (s1 - s0) * frac
    return None


@dataclass(frozen=True)
class GridResult:
    kind: str
    cells: tuple
    records: tuple
    skipped: tuple
    argmin: object


def _cell_spec(spec: ExperimentSpec, kind: str, cell):
    if kind == "delta12":
        d1, d2 = cell
        if d1 < d2:
            return None
        return replace(spec, mark_mode="two", delta1=float(d1),
                       delta2=float(d2))
    if kind == "delta3":
        return replace(spec, mark_mode="one", delta3=float(cell))
    if kind == "lk":
        k = spec.window - int(cell)
        if not 0 <= k <= spec.window - 2:
            return None
        return replace(spec, k_plain=k)
    raise ValueError(f"unknown grid kind {kind!r}")


def grid_search(spec: ExperimentSpec, snr_db: float, kind: str,
                cells) -> GridResult:
    """Run one point per grid cell; argmin over uncensored cells with ties
    broken toward the smaller cell value."""
    cells = list(cells)
    records = []
    kept = []
    skipped = []
    for cell in cells:
        cspec = _cell_spec(spec, kind, cell)
        if cspec is None:
            skipped.append(cell)
            continue
        records.append(run_point(cspec, snr_db))
        kept.append(cell)
    best = None
    for cell, rec in zip(kept, records):
        if rec.censored:
            continue
        key = (rec.post_ber, cell if isinstance(cell, tuple) else (cell,))
        if best is None or key < best[0]:
            best = (key, cell)
    return GridResult(kind=kind, cells=tuple(kept), records=tuple(records),
                      skipped=tuple(skipped),
                      argmin=None if best is None else best[1])


def write_csv(path, records, spec: ExperimentSpec | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if spec is not None:
            fh.write("# spec " + json.dumps(spec.to_dict(), sort_keys=True)
                     + "\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.csv_row())


def write_json(path, records, spec: ExperimentSpec | None = None,
               extra: dict | None = None) -> None:
    doc = {"records": [r.to_dict() for r in records]}
    if spec is not None:
        doc["spec"] = spec.to_dict()
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
