"""Numba kernels for the BCH and staircase window decoders.

All hot loops live here and operate on preallocated ndarrays; the public
modules wrap them in friendlier APIs. Scalars cross the boundary as int64,
RNG state as uint64. Word positions follow the code layout: base bit p is the
coefficient of x^(n-1-p), the extended parity bit (u = 1) sits at position n.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# bit mark codes (single source; marking.py re-exports)
UB = 0
HRB = 1
HUB = 2

# component word cache states
ST_DIRTY = 0
ST_CODEWORD = 1
ST_CACHED = 2

# stats slots for the window engine
NSTATS = 8
S_VISITS = 0
S_BDD = 1
S_WORDS = 2
S_BITS = 3
S_REJECTS = 4
S_BF_TRIES = 5
S_BF_OK = 6
S_BF_FAIL = 7

_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_M2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(z):
    z = z + _SM_GAMMA
    z = (z ^ (z >> np.uint64(30))) * _SM_M1
    z = (z ^ (z >> np.uint64(27))) * _SM_M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def encode_word(info, g_low, degg, n, u, out):
    """Systematic encode: info | parity | overall parity bit when u = 1."""
    k = info.shape[0]
    mask = (np.int64(1) << degg) - 1
    rem = np.int64(0)
    for i in range(k):
        b = np.int64(info[i])
        out[i] = b
        fb = b ^ ((rem >> (degg - 1)) & 1)
        rem = (rem << 1) & mask
        if fb:
            rem ^= g_low
    for i in range(degg):
        out[k + i] = (rem >> (degg - 1 - i)) & 1
    if u == 1:
        par = np.int64(0)
        for i in range(n):
            par ^= out[i]
        out[n] = par


@njit(cache=True, nogil=True)
def encode_block_rows(prev, info, g_low, degg, nc, u, out):
    """Staircase row encode: row j of out = info[j] | parity of the codeword
    [prev[:, j] | info[j] | parity]."""
    w = prev.shape[0]
    kinfo = info.shape[1]
    mask = (np.int64(1) << degg) - 1
    for j in range(w):
        rem = np.int64(0)
        par = np.int64(0)
        for r in range(w):
            b = np.int64(prev[r, j])
            par ^= b
            fb = b ^ ((rem >> (degg - 1)) & 1)
            rem = (rem << 1) & mask
            if fb:
                rem ^= g_low
        for c in range(kinfo):
            b = np.int64(info[j, c])
            out[j, c] = b
            par ^= b
            fb = b ^ ((rem >> (degg - 1)) & 1)
            rem = (rem << 1) & mask
            if fb:
                rem ^= g_low
        for i in range(degg):
            b = (rem >> (degg - 1 - i)) & 1
            out[j, kinfo + i] = b
            par ^= b
        if u == 1:
            out[j, kinfo + degg] = par


@njit(cache=True, nogil=True)
def word_syndromes(word, twot, u, n, pow_syn, syn_out):
    """Base syndromes S_1..S_2t into syn_out; returns the overall parity
    (always 0 when u = 0)."""
    for i in range(twot):
        syn_out[i] = 0
    par = np.int64(0)
    for p in range(n):
        if word[p]:
            par ^= 1
            for i in range(twot):
                syn_out[i] ^= pow_syn[p, i]
    if u == 1:
        if word[n]:
            par ^= 1
    else:
        par = 0
    return par


@njit(cache=True, inline="always")
def _gf_bm(syn, twot, log, alog, n, C):
    """Berlekamp-Massey over GF(2^m); fills the locator C (C[0] = 1) and
    returns its registered degree."""
    B = np.zeros(9, np.int64)
    T = np.empty(9, np.int64)
    for i in range(9):
        C[i] = 0
    C[0] = 1
    B[0] = 1
    L = 0
    m = 1
    b = np.int64(1)
    for ni in range(twot):
        d = syn[ni]
        for i in range(1, L + 1):
            ci = C[i]
            si = syn[ni - i]
            if ci != 0 and si != 0:
                d ^= alog[log[ci] + log[si]]
        if d == 0:
            m += 1
        elif 2 * L <= ni:
            for i in range(9):
                T[i] = C[i]
            coef = (log[d] - log[b]) % n
            for i in range(9 - m):
                bi = B[i]
                if bi != 0:
                    C[i + m] ^= alog[log[bi] + coef]
            L = ni + 1 - L
            for i in range(9):
                B[i] = T[i]
            b = d
            m = 1
        else:
            coef = (log[d] - log[b]) % n
            for i in range(9 - m):
                bi = B[i]
                if bi != 0:
                    C[i + m] ^= alog[log[bi] + coef]
            m += 1
    return L


@njit(cache=True, nogil=True)
def bdd_from_syn(syn, parity, t, u, n, log, alog, pos_out):
    """Radius-t bounded-distance decode from syndromes.

    Writes the error positions (word coordinates) to pos_out and returns the
    error weight, or -1 for Failure. The candidate is verified to zero every
    syndrome before it is accepted, so a Decoded return is always a codeword
    within distance t.
    """
    twot = 2 * t
    nz = False
    for i in range(twot):
        if syn[i] != 0:
            nz = True
            break
    if not nz:
        if u == 1 and parity == 1:
            if t < 1:
                return -1
            pos_out[0] = n
            return 1
        return 0
    C = np.empty(9, np.int64)
    L = _gf_bm(syn, twot, log, alog, n, C)
    if L < 1 or L > t:
        return -1
    acc = np.empty(5, np.int64)
    for k in range(1, L + 1):
        if C[k] == 0:
            acc[k] = -1
        else:
            acc[k] = log[C[k]]
    degs = np.empty(5, np.int64)
    nfound = 0
    overfull = False
    for i in range(n):
        v = np.int64(1)
        for k in range(1, L + 1):
            a = acc[k]
            if a >= 0:
                v ^= alog[a]
                a += k
                if a >= n:
                    a -= n
                acc[k] = a
        if v == 0:
            if nfound >= L:
                overfull = True
                break
            d = n - i
            if d == n:
                d = 0
            degs[nfound] = d
            nfound += 1
    if overfull or nfound != L:
        return -1
    wbase = L
    extra = 0
    if u == 1:
        if (wbase & 1) != parity:
            if wbase + 1 > t:
                return -1
            extra = 1
    for i in range(twot):
        s = syn[i]
        for k in range(wbase):
            s ^= alog[((i + 1) * degs[k]) % n]
        if s != 0:
            return -1
    for k in range(wbase):
        pos_out[k] = n - 1 - degs[k]
    if extra == 1:
        pos_out[wbase] = n
        return wbase + 1
    return wbase


@njit(cache=True, nogil=True)
def bdd_decode_batch(words, t, u, n, log, alog, pow_syn, out_words, out_wgts):
    """Decode many words; out_words gets the corrected word (the input copy on
    Failure), out_wgts the error weight or -1."""
    count = words.shape[0]
    nc = words.shape[1]
    twot = 2 * t
    syn = np.empty(9, np.int64)
    pos = np.empty(5, np.int16)
    for a in range(count):
        for i in range(twot):
            syn[i] = 0
        par = np.int64(0)
        for p in range(n):
            if words[a, p]:
                par ^= 1
                for i in range(twot):
                    syn[i] ^= pow_syn[p, i]
        if u == 1:
            if words[a, n]:
                par ^= 1
        else:
            par = np.int64(0)
        wgt = bdd_from_syn(syn, par, t, u, n, log, alog, pos)
        out_wgts[a] = wgt
        for i in range(nc):
            out_words[a, i] = words[a, i]
        if wgt > 0:
            for k in range(wgt):
                out_words[a, pos[k]] ^= 1


@njit(cache=True, inline="always")
def _syn_word(bits, p, j, twot, u, n, w, pow_syn, syn_row):
    """Syndromes + parity of component word (p, j) into syn_row; True if the
    word is a codeword (all zero)."""
    for i in range(twot):
        syn_row[i] = 0
    par = np.int64(0)
    for r in range(w):
        if bits[p, r, j]:
            par ^= 1
            for i in range(twot):
                syn_row[i] ^= pow_syn[r, i]
    for c in range(w):
        if bits[p + 1, j, c]:
            par ^= 1
            pos = w + c
            if pos < n:
                for i in range(twot):
                    syn_row[i] ^= pow_syn[pos, i]
    if u == 0:
        par = np.int64(0)
    syn_row[twot] = par
    if par != 0:
        return False
    for i in range(twot):
        if syn_row[i] != 0:
            return False
    return True


@njit(cache=True, inline="always")
def _apply_word_changes(bits, state, flags, syn, p, j, chg, cnt, n_res, w, nsyn):
    """Flip the listed word positions, dirty the crossing words, and mark the
    word itself as a codeword with zero cached syndromes."""
    for idx in range(cnt):
        q = np.int64(chg[idx])
        if q < w:
            bits[p, q, j] ^= 1
            if p >= 1:
                state[p - 1, q] = ST_DIRTY
                flags[p - 1, q] = 0
        else:
            c = q - w
            bits[p + 1, j, c] ^= 1
            if p + 1 <= n_res - 2:
                state[p + 1, c] = ST_DIRTY
                flags[p + 1, c] = 0
    state[p, j] = ST_CODEWORD
    for i in range(nsyn):
        syn[p, j, i] = 0


@njit(cache=True, inline="always")
def _miscorr_ok(pos, cnt, p, j, marks, fsnap, w):
    """Accept iff no flipped position is HRB or lies in a flagged crossing
    component word. fsnap holds the group-entry flags of the two neighbor
    pairs (zeros where no neighbor exists), so all rows of a group check
    against the same snapshot."""
    for idx in range(cnt):
        q = np.int64(pos[idx])
        if q < w:
            if marks[p, q, j] == HRB:
                return False
            if fsnap[0, q] != 0:
                return False
        else:
            c = q - w
            if marks[p + 1, j, c] == HRB:
                return False
            if fsnap[1, c] != 0:
                return False
    return True


@njit(cache=True, nogil=True)
def window_iteration(bits, marks, syn, state, errw, errpos, flags, attempts,
                     n_res, k_plain, isabm, window_idx, flip_seed,
                     t, u, n, nc, w, d0, log, alog, pow_syn, stats):
    """One decoding iteration over all resident pairs, newest pair first.

    Standard mode (isabm = 0) accepts every Decoded output; bit-marking mode
    guards Decoded outputs with the mark/flag check and retries rejected or
    failed words once per visit by flipping f highly-unreliable bits. Returns
    the number of bits changed.
    """
    twot = 2 * t
    nsyn = twot + 1
    changed = np.int64(0)
    hubs = np.empty(nc, np.int64)
    flips = np.empty(8, np.int64)
    pos2 = np.empty(5, np.int16)
    syn2 = np.empty(9, np.int64)
    chg = np.empty(16, np.int16)
    fsnap = np.zeros((2, w), np.uint8)
    for p in range(n_res - 2, -1, -1):
        plain = (isabm == 0) or (p < k_plain)
        if not plain:
            for q in range(w):
                fsnap[0, q] = flags[p - 1, q] if p >= 1 else 0
                fsnap[1, q] = flags[p + 1, q] if p + 1 <= n_res - 2 else 0
        for j in range(w):
            stats[S_VISITS] += 1
            st = state[p, j]
            if st == ST_CODEWORD:
                if isabm == 1 and flags[p, j] == 0:
                    flags[p, j] = 1
                continue
            if st == ST_DIRTY:
                z = _syn_word(bits, p, j, twot, u, n, w, pow_syn, syn[p, j])
                if z:
                    state[p, j] = ST_CODEWORD
                    if isabm == 1:
                        flags[p, j] = 1
                    continue
                stats[S_BDD] += 1
                wgt0 = bdd_from_syn(syn[p, j], syn[p, j, twot], t, u, n,
                                    log, alog, errpos[p, j])
                errw[p, j] = wgt0
                state[p, j] = ST_CACHED
            wgt = np.int64(errw[p, j])
            if plain:
                if wgt <= 0:
                    continue
                for idx in range(wgt):
                    chg[idx] = errpos[p, j, idx]
                _apply_word_changes(bits, state, flags, syn, p, j, chg, wgt,
                                    n_res, w, nsyn)
                stats[S_WORDS] += 1
                stats[S_BITS] += wgt
                changed += wgt
                continue
            f = np.int64(0)
            if wgt >= 0:
                if _miscorr_ok(errpos[p, j], wgt, p, j, marks, fsnap, w):
                    for idx in range(wgt):
                        chg[idx] = errpos[p, j, idx]
                    _apply_word_changes(bits, state, flags, syn, p, j, chg,
                                        wgt, n_res, w, nsyn)
                    flags[p, j] = 1
                    stats[S_WORDS] += 1
                    stats[S_BITS] += wgt
                    changed += wgt
                    continue
                stats[S_REJECTS] += 1
                f = d0 - wgt - t
            else:
                f = 1
            if f <= 0:
                continue
            nhub = 0
            for r in range(w):
                if marks[p, r, j] == HUB:
                    hubs[nhub] = r
                    nhub += 1
            for c in range(w):
                if marks[p + 1, j, c] == HUB:
                    hubs[nhub] = w + c
                    nhub += 1
            if nhub < f:
                continue
            attempt = np.int64(attempts[p, j])
            attempts[p, j] = attempt + 1
            stats[S_BF_TRIES] += 1
            s64 = _mix64(flip_seed ^ np.uint64(window_idx))
            s64 = _mix64(s64 ^ (np.uint64(p) << np.uint64(32)) ^ np.uint64(j))
            s64 = _mix64(s64 ^ np.uint64(attempt))
            for i in range(f):
                s64 = _mix64(s64)
                r_i = np.int64(s64 % np.uint64(nhub - i))
                sw = i + r_i
                tmp = hubs[i]
                hubs[i] = hubs[sw]
                hubs[sw] = tmp
                flips[i] = hubs[i]
            for i in range(nsyn):
                syn2[i] = syn[p, j, i]
            for i in range(f):
                q = flips[i]
                if q < n:
                    for k in range(twot):
                        syn2[k] ^= pow_syn[q, k]
                if u == 1:
                    syn2[twot] ^= 1
            stats[S_BDD] += 1
            wgt2 = np.int64(bdd_from_syn(syn2, syn2[twot], t, u, n,
                                         log, alog, pos2))
            if wgt2 < 0:
                stats[S_BF_FAIL] += 1
                continue
            if not _miscorr_ok(pos2, wgt2, p, j, marks, fsnap, w):
                stats[S_BF_FAIL] += 1
                continue
            cnt = 0
            for i in range(f):
                q = flips[i]
                dup = False
                for k2 in range(wgt2):
                    if np.int64(pos2[k2]) == q:
                        dup = True
                        break
                if not dup:
                    chg[cnt] = q
                    cnt += 1
            for k2 in range(wgt2):
                q = np.int64(pos2[k2])
                dup = False
                for i in range(f):
                    if flips[i] == q:
                        dup = True
                        break
                if not dup:
                    chg[cnt] = q
                    cnt += 1
            _apply_word_changes(bits, state, flags, syn, p, j, chg, cnt,
                                n_res, w, nsyn)
            flags[p, j] = 1
            stats[S_WORDS] += 1
            stats[S_BITS] += cnt
            stats[S_BF_OK] += 1
            changed += cnt
    return changed
