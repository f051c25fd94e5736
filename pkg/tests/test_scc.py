"""Staircase block geometry: parameters, encoding validity, component-word
extraction and the two-words-per-bit coupling."""

from fractions import Fraction

import numpy as np
import pytest

from sccsim.gf_bch import build_code, syndromes
from sccsim.scc import (
    SccEncoder,
    SccParams,
    encode_next_block,
    extract_component_word,
    write_component_word,
    zero_block,
)

C1 = build_code(8, 2, u=1)
P1 = SccParams(C1, window=9, iters=7)


def random_stream(params, nblocks, seed):
    rng = np.random.default_rng(seed)
    enc = SccEncoder(params)
    blocks = [zero_block(params)]
    for _ in range(nblocks):
        info = rng.integers(0, 2, params.info_bits_per_block, dtype=np.uint8)
        blocks.append(enc.push(info))
    return blocks


def test_parameter_values():
    assert P1.w == 128
    assert P1.rate == Fraction(111, 128)
    assert P1.info_bits_per_block == 14208
    assert C1.parity_bits == 17
    assert SccParams(build_code(8, 3, u=1)).rate == Fraction(103, 128)
    assert SccParams(build_code(8, 4, u=1)).rate == Fraction(95, 128)


def test_rate_matches_geometry():
    for t in (2, 3, 4):
        code = build_code(8, t, u=1)
        p = SccParams(code)
        assert p.rate == Fraction(2 * code.kc - code.nc, code.nc)
        assert p.info_bits_per_block == p.w * (code.kc - p.w)
        assert p.rate == Fraction(p.info_bits_per_block, p.w * p.w)


def test_params_validation():
    odd = build_code(4, 1, u=0)
    with pytest.raises(ValueError):
        SccParams(odd)
    square = build_code(4, 2, u=1)
    with pytest.raises(ValueError):
        SccParams(square)
    with pytest.raises(ValueError):
        SccParams(C1, window=1)
    with pytest.raises(ValueError):
        SccParams(C1, iters=0)


def test_zero_info_encodes_to_zero():
    enc = SccEncoder(P1)
    for _ in range(3):
        blk = enc.push(np.zeros(P1.info_bits_per_block, dtype=np.uint8))
        assert not blk.any()


def test_encoded_stream_rows_are_codewords():
    blocks = random_stream(P1, 100, seed=10)
    for older, newer in zip(blocks, blocks[1:]):
        for j in range(P1.w):
            word = extract_component_word(older, newer, j)
            syn, par = syndromes(C1, word)
            assert not syn.any() and par == 0


def test_extract_layout():
    rng = np.random.default_rng(11)
    older = rng.integers(0, 2, (P1.w, P1.w), dtype=np.uint8)
    newer = rng.integers(0, 2, (P1.w, P1.w), dtype=np.uint8)
    j = 37
    word = extract_component_word(older, newer, j)
    assert (word[: P1.w] == older[:, j]).all()
    assert (word[P1.w :] == newer[j, :]).all()


def test_write_extract_involution():
    rng = np.random.default_rng(12)
    older = rng.integers(0, 2, (P1.w, P1.w), dtype=np.uint8)
    newer = rng.integers(0, 2, (P1.w, P1.w), dtype=np.uint8)
    for j in (0, 63, 127):
        word = extract_component_word(older, newer, j)
        flipped = word.copy()
        flipped[5] ^= 1
        flipped[P1.w + 9] ^= 1
        write_component_word(older, newer, j, flipped)
        assert older[5, j] == flipped[5]
        assert newer[j, 9] == flipped[P1.w + 9]
        again = extract_component_word(older, newer, j)
        assert (again == flipped).all()


def test_each_bit_lives_in_two_words():
    blocks = random_stream(P1, 3, seed=13)
    a, b, c = blocks[0], blocks[1], blocks[2]
    r, col = 17, 90
    word_row = extract_component_word(a, b, r)
    assert word_row[P1.w + col] == b[r, col]
    word_col = extract_component_word(b, c, col)
    assert word_col[r] == b[r, col]

    b[r, col] ^= 1
    assert extract_component_word(a, b, r)[P1.w + col] == b[r, col]
    assert extract_component_word(b, c, col)[r] == b[r, col]


def test_encode_next_block_systematic():
    rng = np.random.default_rng(14)
    prev = zero_block(P1)
    info = rng.integers(0, 2, P1.info_bits_per_block, dtype=np.uint8)
    blk = encode_next_block(P1, prev, info)
    kc_cols = C1.kc - P1.w
    assert (blk[:, :kc_cols].ravel() == info).all()
    for j in range(P1.w):
        syn, par = syndromes(C1, extract_component_word(prev, blk, j))
        assert not syn.any() and par == 0


def test_encoder_streaming_matches_manual():
    rng = np.random.default_rng(15)
    infos = [
        rng.integers(0, 2, P1.info_bits_per_block, dtype=np.uint8)
        for _ in range(5)
    ]
    enc = SccEncoder(P1)
    streamed = [enc.push(i) for i in infos]
    prev = zero_block(P1)
    for info, blk in zip(infos, streamed):
        manual = encode_next_block(P1, prev, info)
        assert (manual == blk).all()
        prev = manual


def test_encode_next_block_validation():
    prev = zero_block(P1)
    with pytest.raises(ValueError):
        encode_next_block(P1, prev, np.zeros(3, dtype=np.uint8))
    with pytest.raises(ValueError):
        encode_next_block(P1, prev[:10], np.zeros(P1.info_bits_per_block, dtype=np.uint8))
