"""Acceptance suite: one criterion per test, one printed verdict line each.

Statistical criteria share a fixed master seed so compared configurations
see identical noise streams; budgets are sized so every gated point
collects enough error events for the stated tolerance.
"""

import time

import numpy as np
import pytest

from sccsim.air import (LinkParams, air_table, gn_reach, hd_air,
                        net_rate_gbps)
from sccsim.cli import main
from sccsim.modem import pam_gray
from sccsim.gf_bch import bdd_decode_many, build_code, encode
from sccsim.harness import (ExperimentSpec, component_code, grid_search,
                            required_snr_at, run_point)
from sccsim.scc import SccParams

_POP16 = ((np.arange(1 << 16)[:, None] >> np.arange(16)[None, :]) & 1) \
    .sum(axis=1).astype(np.uint8)


@pytest.fixture
def report(capsys):
    def _report(num, ok, detail):
        verdict = "PASS" if ok else "FAIL"
        with capsys.disabled():
            print(f"ACCEPTANCE {num:>2} {verdict}  {detail}", flush=True)
    return _report


def make_spec(**overrides):
    base = dict(code="C1", decoder="isabm", pam_m=1, window=9, iters=7,
                k_plain=2, mark_mode="two", delta1=10.0, delta2=2.5,
                min_errors=10_000_000, max_info_bits=15_000_000,
                shards=8, chunk_blocks=48, master_seed=21)
    base.update(overrides)
    return ExperimentSpec(**base)


def test_01_code_parameters(report):
    expected = {"C1": (256, 239, 128, 0.8671875),
                "C2": (256, 231, 128, 0.8046875),
                "C3": (256, 223, 128, 0.7421875)}
    t0 = time.perf_counter()
    got = {}
    for name, (nu, t) in (("C1", (8, 2)), ("C2", (8, 3)), ("C3", (8, 4))):
        code = build_code(nu, t, u=1)
        params = SccParams(code)
        got[name] = (code.nc, code.kc, params.w, float(params.rate))
    elapsed = time.perf_counter() - t0
    ok = got == expected and elapsed < 1.0
    report(1, ok, f"(nc,kc,w,R) {got}  built in {elapsed:.3f} s")
    assert got == expected
    assert elapsed < 1.0


def exhaustive_reference(code):
    """Unique-codeword-within-radius-t rule, by brute force over 2^n words."""
    n = code.nc
    cb = np.zeros(1 << code.kc, dtype=np.int64)
    info = ((np.arange(1 << code.kc)[:, None] >> np.arange(code.kc)) & 1) \
        .astype(np.uint8)
    for i in range(1 << code.kc):
        cw = encode(code, info[i])
        cb[i] = int(cw @ (1 << np.arange(n, dtype=np.int64)))
    words = np.arange(1 << n, dtype=np.int64)
    mindist = np.empty(1 << n, dtype=np.int64)
    nearest = np.empty(1 << n, dtype=np.int64)
    for lo in range(0, 1 << n, 4096):
        chunk = words[lo:lo + 4096]
        dist = _POP16[chunk[:, None] ^ cb[None, :]]
        idx = dist.argmin(axis=1)
        mindist[lo:lo + 4096] = dist[np.arange(len(chunk)), idx]
        nearest[lo:lo + 4096] = cb[idx]
    return mindist, nearest


def test_02_bdd_matches_exhaustive_decoding(report):
    t0 = time.perf_counter()
    checked = []
    for t, u in ((1, 0), (1, 1), (2, 0), (2, 1)):
        code = build_code(4, t, u=u)
        n = code.nc
        mindist, nearest = exhaustive_reference(code)
        words = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1) \
            .astype(np.uint8)
        out, wgts = bdd_decode_many(code, words)
        packed = out.astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))
        inside = mindist <= t
        assert (wgts[inside] == mindist[inside]).all()
        assert (packed[inside] == nearest[inside]).all()
        assert (wgts[~inside] == -1).all()
        checked.append(f"(n={n},t={t}):2^{n}")
    elapsed = time.perf_counter() - t0
    ok = elapsed < 60.0
    report(2, ok, f"all words agree for {', '.join(checked)}  "
                  f"in {elapsed:.1f} s")
    assert ok


def test_03_ber_point_645(report):
    target = 4.5e-3
    rec = run_point(make_spec(max_info_bits=15_000_000), 6.45)
    ratio = rec.post_ber / target
    ok = rec.errors >= 100 and 0.5 <= ratio <= 2.0
    report(3, ok, f"6.45 dB: post-FEC BER {rec.post_ber:.3e} vs {target:.1e} "
                  f"(x{ratio:.2f}), {rec.errors} errors / {rec.bits} bits")
    assert rec.errors >= 100
    assert 0.5 <= ratio <= 2.0


def test_04_ber_point_655(report):
    target = 1.78e-4
    spec = make_spec(delta1=10.5, delta2=3.0, max_info_bits=30_000_000)
    rec = run_point(spec, 6.55)
    ratio = rec.post_ber / target
    ok = rec.errors >= 100 and 1 / 3 <= ratio <= 3.0
    report(4, ok, f"6.55 dB: post-FEC BER {rec.post_ber:.3e} vs {target:.1e} "
                  f"(x{ratio:.2f}), {rec.errors} errors / {rec.bits} bits")
    assert rec.errors >= 100
    assert 1 / 3 <= ratio <= 3.0


def test_05_threshold_pair_is_grid_minimum(report):
    cells = [(8.0, 2.0), (10.0, 2.5), (12.0, 4.0), (10.0, 0.5), (14.0, 2.5)]
    spec = make_spec(min_errors=20_000, max_info_bits=10_000_000)
    result = grid_search(spec, 6.45, "delta12", cells)
    bers = {c: r.post_ber for c, r in zip(result.cells, result.records)}
    ok = (result.argmin == (10.0, 2.5)
          and not any(r.censored for r in result.records))
    detail = "  ".join(f"{c}:{b:.3e}" for c, b in bers.items())
    report(5, ok, f"6.45 dB argmin {result.argmin}  {detail}")
    assert not any(r.censored for r in result.records)
    assert result.argmin == (10.0, 2.5)


def test_06_ber_improves_with_marked_block_count(report):
    snr = 6.9
    budgets = {3: 6_000_000, 5: 12_000_000, 7: 98_000_000, 8: 98_000_000}
    bers = {}
    errs = {}
    for lk, budget in budgets.items():
        spec = make_spec(k_plain=9 - lk, max_info_bits=budget)
        rec = run_point(spec, snr)
        bers[lk] = rec.post_ber
        errs[lk] = rec.errors
    ok = (bers[3] >= bers[5] >= bers[7]
          and bers[8] > bers[7]
          and min(errs.values()) >= 50)
    detail = "  ".join(f"L-K={lk}:{bers[lk]:.3e}({errs[lk]}e)"
                       for lk in (3, 5, 7, 8))
    report(6, ok, f"{snr} dB  {detail}")
    assert min(errs.values()) >= 50
    assert bers[3] >= bers[5] >= bers[7]
    assert bers[8] > bers[7]


def test_07_snr_gain_at_1e4(report):
    target = 1e-4
    std = [run_point(make_spec(decoder="standard",
                               max_info_bits=budget), snr)
           for snr, budget in ((7.2, 10_000_000), (7.33, 30_000_000))]
    isabm = [run_point(make_spec(max_info_bits=30_000_000), snr)
             for snr in (6.6, 6.7)]
    snr_std = required_snr_at(std, target)
    snr_isabm = required_snr_at(isabm, target)
    gain = snr_std - snr_isabm
    ok = 0.4 <= gain <= 0.8
    report(7, ok, f"required SNR at BER 1e-4: standard {snr_std:.3f} dB, "
                  f"marked {snr_isabm:.3f} dB, gain {gain:.3f} dB")
    assert 0.4 <= gain <= 0.8


def test_08_rate_curves_and_data_rates(report):
    for m, lo, hi in ((1, 0.0, 16.0), (3, 5.0, 25.0)):
        cons = pam_gray(m)
        grid = np.arange(lo, hi + 0.25, 0.5)
        table = air_table(cons, grid)
        assert all(pt.i_gmi >= pt.i_hd - 1e-9 for pt in table)
        assert hd_air(0.0, m) == 4.0 * m
        assert hd_air(0.5, m) == 0.0
    stated = {(1, "C3"): 134, (1, "C2"): 145, (1, "C1"): 156,
              (3, "C3"): 401, (3, "C2"): 434, (3, "C1"): 468}
    rounded = {(1, "C3"): 134, (1, "C2"): 145, (1, "C1"): 156,
               (3, "C3"): 401, (3, "C2"): 435, (3, "C1"): 468}
    computed = {key: net_rate_gbps(key[0], component_code(key[1]))
                for key in stated}
    dev = max(abs(computed[k] - stated[k]) for k in stated)
    ok = (all(round(computed[k]) == rounded[k] for k in stated)
          and dev <= 0.6)
    rates = "  ".join(f"{k[1]}@{2 ** k[0]}PAM:{computed[k]:.2f}"
                      for k in stated)
    report(8, ok, f"GMI >= HD on both grids; limits exact; {rates} Gbps "
                  f"(max gap to nominal {dev:.3f})")
    assert all(round(computed[k]) == rounded[k] for k in stated)
    assert dev <= 0.6


def test_09_reach_gains(report):
    link = LinkParams()
    results = {}
    for label, base, gain, lo, hi in (("2-PAM", 7.33, 0.68, 12.0, 22.0),
                                      ("8-PAM", 20.03, 0.89, 17.0, 27.0)):
        r0 = gn_reach(link, base)
        r1 = gn_reach(link, base - gain)
        pct = 100.0 * (r1.reach_km - r0.reach_km) / r0.reach_km
        results[label] = (pct, lo <= pct <= hi,
                          r0.reach_km, r1.reach_km)
    reaches = [gn_reach(link, s).reach_km for s in np.arange(5.0, 25.5, 1.0)]
    monotone = all(a >= b for a, b in zip(reaches, reaches[1:]))
    ok = monotone and all(v[1] for v in results.values())
    detail = "  ".join(
        f"{lab}: {v[2]:.0f}->{v[3]:.0f} km (+{v[0]:.1f}%)"
        for lab, v in results.items())
    report(9, ok, detail + f"  monotone={monotone}")
    assert monotone
    for label, (pct, in_band, _, _) in results.items():
        assert in_band, (label, pct)


def test_10_manifest_rerun_is_byte_identical(report, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    argv = ["simulate", "--code", "C1", "--decoder", "isabm",
            "--snr", "6.4", "--min-errors", "50",
            "--max-info-bits", "300000", "--shards", "4", "--seed", "9",
            "--out", str(a)]
    assert main(argv) == 0
    assert main(["simulate", "--manifest", str(a / "manifest.json"),
                 "--out", str(b)]) == 0
    same = (a / "results.csv").read_bytes() == \
        (b / "results.csv").read_bytes()
    report(10, same, "manifest re-run reproduced results.csv byte for byte")
    assert same
