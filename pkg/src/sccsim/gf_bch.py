"""Galois-field tables and extended BCH component codes.

A code is built from (nu, t, u): base length n = 2^nu - 1, error-correcting
radius t, optionally extended by one overall parity bit (u = 1). The generator
is the product of the minimal polynomials of alpha, alpha^3, ..., alpha^(2t-1).
Bit i of a word is the coefficient of x^(n-1-i), so information bits occupy
the first kc positions and parity (extended bit last) the remainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels as K

PRIMITIVE_POLYS = {
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


@dataclass(frozen=True, eq=False)
class GfTables:
    """Log/antilog tables for GF(2^m). alog holds two periods so products of
    two logs never need a modular reduction."""

    m: int
    n: int
    poly: int
    log: np.ndarray
    alog: np.ndarray

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.alog[int(self.log[a]) + int(self.log[b])])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        return int(self.alog[(self.n - int(self.log[a])) % self.n])

    def pow_alpha(self, e: int) -> int:
        return int(self.alog[e % self.n])


@lru_cache(maxsize=None)
def gf_tables(m: int) -> GfTables:
    if m not in PRIMITIVE_POLYS:
        raise ValueError(f"no primitive polynomial on file for m={m}")
    n = (1 << m) - 1
    poly = PRIMITIVE_POLYS[m]
    log = np.full(n + 1, -1, dtype=np.int64)
    alog = np.zeros(2 * n, dtype=np.int64)
    x = 1
    for i in range(n):
        alog[i] = x
        alog[i + n] = x
        log[x] = i
        x <<= 1
        if x & (1 << m):
            x ^= poly
    return GfTables(m=m, n=n, poly=poly, log=log, alog=alog)


def cyclotomic_coset(n: int, e: int) -> tuple[int, ...]:
    """The 2-cyclotomic coset of e mod n, starting from e."""
    out = [e % n]
    c = (out[0] * 2) % n
    while c != out[0]:
        out.append(c)
        c = (c * 2) % n
    return tuple(out)


def minimal_polynomial(tb: GfTables, e: int) -> int:
    """Minimal polynomial of alpha^e over GF(2), as a bit mask (bit i = x^i)."""
    poly = [1]
    for c in cyclotomic_coset(tb.n, e):
        root = tb.pow_alpha(c)
        nxt = [0] * (len(poly) + 1)
        for i, co in enumerate(poly):
            nxt[i + 1] ^= co
            nxt[i] ^= tb.mul(co, root)
        poly = nxt
    mask = 0
    for i, co in enumerate(poly):
        if co not in (0, 1):
            raise AssertionError("minimal polynomial left GF(2)")
        if co:
            mask |= 1 << i
    return mask


def gf2_poly_mul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def gf2_poly_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def generator_polynomial(tb: GfTables, t: int) -> int:
    """Product of the minimal polynomials of the odd powers alpha^1..alpha^(2t-1),
    one factor per distinct cyclotomic coset."""
    g = 1
    seen: set[int] = set()
    for e in range(1, 2 * t, 2):
        rep = min(cyclotomic_coset(tb.n, e))
        if rep in seen:
            continue
        seen.add(rep)
        g = gf2_poly_mul(g, minimal_polynomial(tb, e))
    return g


@dataclass(frozen=True, eq=False)
class BchCode:
    """Extended BCH code (nc, kc) with decoding radius t and design distance d0."""

    nu: int
    t: int
    u: int
    n: int
    nc: int
    kc: int
    d0: int
    generator: int
    tables: GfTables
    pow_syn: np.ndarray

    @property
    def parity_bits(self) -> int:
        return self.nc - self.kc

    def __repr__(self) -> str:
        return f"BchCode(nc={self.nc}, kc={self.kc}, t={self.t}, u={self.u})"


def build_code(nu: int, t: int, u: int = 1) -> BchCode:
    """Construct the (nc, kc) = (2^nu - 1 + u, nc - nu*t - u) component code."""
    if u not in (0, 1):
        raise ValueError("u must be 0 or 1")
    if t < 1:
        raise ValueError("t must be >= 1")
    tb = gf_tables(nu)
    n = tb.n
    if nu * t + u >= n:
        raise ValueError("parity overhead nu*t + u must stay below 2^nu - 1")
    g = generator_polynomial(tb, t)
    degg = g.bit_length() - 1
    if degg != nu * t:
        raise ValueError(
            f"generator degree {degg} != nu*t = {nu * t}: a cyclotomic coset "
            "degenerates for these parameters and the (nc, kc) formulas do "
            "not apply")
    nc = n + u
    kc = nc - nu * t - u
    degrees = np.arange(n - 1, -1, -1, dtype=np.int64)
    powers = np.arange(1, 2 * t + 1, dtype=np.int64)
    pow_syn = tb.alog[(degrees[:, None] * powers[None, :]) % n]
    return BchCode(nu=nu, t=t, u=u, n=n, nc=nc, kc=kc, d0=2 * t + 1 + u,
                   generator=g, tables=tb,
                   pow_syn=np.ascontiguousarray(pow_syn))


def _as_bits(x, length: int, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.uint8)
    if arr.shape != (length,):
        raise ValueError(f"{name} must have shape ({length},), got {arr.shape}")
    if arr.size and arr.max() > 1:
        raise ValueError(f"{name} must contain only 0/1")
    return arr


def encode(code: BchCode, info) -> np.ndarray:
    """Systematic encode of kc information bits into an nc-bit codeword."""
    info = _as_bits(info, code.kc, "info")
    out = np.empty(code.nc, dtype=np.uint8)
    g_low = code.generator ^ (1 << (code.nc - code.kc - code.u))
    K.encode_word(info, g_low, code.nc - code.kc - code.u, code.n, code.u, out)
    return out


def syndromes(code: BchCode, word) -> tuple[np.ndarray, int]:
    """Base syndromes S_1..S_2t and the overall parity of an nc-bit word."""
    word = _as_bits(word, code.nc, "word")
    syn = np.empty(2 * code.t, dtype=np.int64)
    par = K.word_syndromes(word, 2 * code.t, code.u, code.n, code.pow_syn, syn)
    return syn, int(par)


@dataclass(frozen=True, eq=False)
class BddResult:
    """Outcome of a bounded-distance decode. On Failure the codeword and
    error pattern are None and the weight is -1."""

    decoded: bool
    codeword: np.ndarray | None
    error_pattern: np.ndarray | None
    weight: int


def bdd_decode(code: BchCode, r) -> BddResult:
    """Bounded-distance decode with radius t. Decoded outputs are always valid
    codewords within Hamming distance t of r; everything else is Failure."""
    r = _as_bits(r, code.nc, "r")
    syn = np.empty(9, dtype=np.int64)
    par = K.word_syndromes(r, 2 * code.t, code.u, code.n, code.pow_syn, syn)
    pos = np.empty(5, dtype=np.int16)
    wgt = int(K.bdd_from_syn(syn, np.int64(par), code.t, code.u, code.n,
                             code.tables.log, code.tables.alog, pos))
    if wgt < 0:
        return BddResult(decoded=False, codeword=None, error_pattern=None,
                         weight=-1)
    e = np.zeros(code.nc, dtype=np.uint8)
    if wgt:
        e[pos[:wgt].astype(np.int64)] = 1
    return BddResult(decoded=True, codeword=r ^ e, error_pattern=e, weight=wgt)


def bdd_decode_many(code: BchCode, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized bdd_decode over rows; returns (decoded words, weights) where
    weight -1 marks Failure (row returned unchanged)."""
    words = np.ascontiguousarray(words, dtype=np.uint8)
    if words.ndim != 2 or words.shape[1] != code.nc:
        raise ValueError(f"words must be (N, {code.nc})")
    out = np.empty_like(words)
    wgts = np.empty(words.shape[0], dtype=np.int8)
    K.bdd_decode_batch(words, code.t, code.u, code.n, code.tables.log,
                       code.tables.alog, code.pow_syn, out, wgts)
    return out, wgts
