"""Rate curves: pre-FEC BER closed form, binary-entropy HD rate, Gauss-Hermite
GMI, required-SNR inversion and the GN-model reach."""

import math

import numpy as np
import pytest
from scipy.special import ndtr

from sccsim.air import (
    LinkParams,
    air_table,
    ase_nli_powers,
    gmi,
    gmi_mc,
    gn_reach,
    hd_air,
    net_rate_gbps,
    optimal_launch_power_dbm,
    pre_fec_ber,
    required_snr,
    scc_air,
)
from sccsim.gf_bch import build_code
from sccsim.modem import Channel, hd_demap, map_symbols, pam_gray

PAM2 = pam_gray(1)
PAM8 = pam_gray(3)
C1 = build_code(8, 2, u=1)
C2 = build_code(8, 3, u=1)
C3 = build_code(8, 4, u=1)


def hd_curve(cons):
    return lambda s: hd_air(min(pre_fec_ber(cons, s), 0.5), cons.m)


def test_pre_fec_ber_2pam_closed_form():
    for snr_db in (0.0, 3.0, 6.45, 10.0):
        q = float(ndtr(-math.sqrt(10 ** (snr_db / 10))))
        assert pre_fec_ber(PAM2, snr_db) == pytest.approx(q, rel=1e-12)
    assert pre_fec_ber(PAM2, 6.45) == pytest.approx(
        0.017804786074723265, rel=1e-12)


def test_pre_fec_ber_8pam_matches_simulation():
    snr_db = 14.0
    p = pre_fec_ber(PAM8, snr_db)
    rng = np.random.default_rng(60)
    bits = rng.integers(0, 2, 3_000_000, dtype=np.uint8)
    ch = Channel(snr_db, seed=61)
    y = ch.transmit(map_symbols(PAM8, bits))
    mc = float((hd_demap(PAM8, y) != bits).mean())
    sigma = math.sqrt(p * (1 - p) / bits.size)
    assert abs(mc - p) < 5 * sigma


def test_pre_fec_ber_decreasing():
    grid = np.linspace(0, 22, 23)
    for cons in (PAM2, PAM8):
        vals = [pre_fec_ber(cons, s) for s in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_hd_air_limits_exact():
    for m in (1, 2, 3):
        assert hd_air(0.0, m) == 4.0 * m
        assert hd_air(0.5, m) == 0.0
    assert hd_air(0.11, 1) == pytest.approx(2.00033, abs=5e-4)
    with pytest.raises(ValueError):
        hd_air(-0.01, 1)
    with pytest.raises(ValueError):
        hd_air(0.51, 1)


def test_hd_air_strictly_decreasing():
    ps = np.linspace(0.0, 0.5, 51)
    vals = [hd_air(float(p), 1) for p in ps]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_gmi_reference_values():
    assert gmi(PAM2, 6.45) == pytest.approx(3.72435092789606, abs=1e-9)
    assert gmi(PAM2, 0.0) == pytest.approx(1.9437766165317414, abs=1e-9)
    assert gmi(PAM8, 20.0) == pytest.approx(11.602923591669446, abs=1e-9)


def test_gmi_saturates_at_4m():
    assert gmi(PAM2, 40.0) == pytest.approx(4.0, abs=1e-6)
    assert gmi(PAM8, 40.0) >= 11.99
    for cons in (PAM2, PAM8):
        assert gmi(cons, -10.0) >= 0.0


def test_gmi_quadrature_matches_monte_carlo():
    ref = gmi(PAM2, 0.0)
    est = gmi_mc(PAM2, 0.0, samples=1_000_000, seed=62)
    assert abs(est / ref - 1.0) < 0.005


def test_air_table_gmi_dominates_hd():
    for cons, grid in ((PAM2, np.arange(0.0, 16.5, 0.5)),
                       (PAM8, np.arange(5.0, 25.5, 0.5))):
        table = air_table(cons, grid)
        for pt in table:
            assert pt.i_gmi >= pt.i_hd - 1e-9
            assert 0.0 <= pt.i_hd <= 4.0 * cons.m
        hd_vals = [pt.i_hd for pt in table]
        assert all(a <= b for a, b in zip(hd_vals, hd_vals[1:]))


def test_scc_air_values():
    assert scc_air(1, C1) == 3.46875
    assert scc_air(3, C1) == 10.40625
    assert scc_air(3, C2) == 9.65625
    assert scc_air(3, C3) == 8.90625


def test_net_rates_exact():
    assert net_rate_gbps(1, C3) == 133.59375
    assert net_rate_gbps(1, C2) == 144.84375
    assert net_rate_gbps(1, C1) == 156.09375
    assert net_rate_gbps(3, C3) == 400.78125
    assert net_rate_gbps(3, C2) == 434.53125
    assert net_rate_gbps(3, C1) == 468.28125


def test_required_snr_inversion():
    req = required_snr(3.46875, hd_curve(PAM2), lo_db=-5.0, hi_db=20.0)
    assert req == pytest.approx(6.38724684715271, abs=1e-3)
    assert hd_curve(PAM2)(req) == pytest.approx(3.46875, abs=1e-5)
    lo = required_snr(2.0, hd_curve(PAM2), lo_db=-5.0, hi_db=20.0)
    hi = required_snr(3.0, hd_curve(PAM2), lo_db=-5.0, hi_db=20.0)
    assert lo < hi
    gmi_req = required_snr(3.46875, lambda s: gmi(PAM2, s),
                           lo_db=-5.0, hi_db=20.0)
    assert gmi_req < req


def test_required_snr_needs_bracketing_range():
    with pytest.raises(ValueError):
        required_snr(4.1, hd_curve(PAM2), lo_db=-5.0, hi_db=20.0)
    with pytest.raises(ValueError):
        required_snr(3.9, hd_curve(PAM2), lo_db=15.0, hi_db=20.0)


def test_link_params_validation():
    link = LinkParams()
    assert link.span_km == 80.0
    assert link.channels == 11
    with pytest.raises(ValueError):
        LinkParams(span_km=0.0)
    with pytest.raises(ValueError):
        LinkParams(nf_db=-3.0)


def test_optimal_power_balances_ase_and_nli():
    link = LinkParams()
    p_opt = optimal_launch_power_dbm(link)
    ase, nli = ase_nli_powers(link, p_opt)
    assert ase == pytest.approx(2.0 * nli, rel=1e-3)
    snr1_db = 10 * math.log10(
        10 ** (p_opt / 10) * 1e-3 / (ase + nli))
    assert snr1_db == pytest.approx(29.45, abs=0.05)


def test_reach_monotone_in_required_snr():
    link = LinkParams()
    reqs = [5.0, 7.0, 10.0, 15.0, 20.0, 25.0]
    spans = [gn_reach(link, r).max_spans for r in reqs]
    assert all(a >= b for a, b in zip(spans, spans[1:]))
    assert spans[-1] >= 1
    res = gn_reach(link, 7.0)
    assert res.reach_km == res.max_spans * link.span_km
    assert gn_reach(link, 7.0 - 0.5).max_spans >= res.max_spans


def test_reach_unreachable_raises():
    with pytest.raises(ValueError):
        gn_reach(LinkParams(), 35.0)
