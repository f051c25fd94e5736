"""Achievable information rates and fiber reach.

Rates are per four-dimensional symbol (dual polarization times I/Q), hence
the factor of 4 on the per-real-dimension quantities. The hard-decision rate
uses the binary-entropy formula on the exact pre-FEC bit error probability;
the soft-decision rate is the bit-metric GMI with exact LLRs, evaluated by
Gauss-Hermite quadrature (Monte Carlo estimator available as a cross-check).
Reach uses the incoherent Gaussian-noise model: per-span nonlinear power
eta * P^3, ASE from full span-loss compensation, integer 80 km spans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as _C_LIGHT
from scipy.constants import h as _H_PLANCK
from scipy.special import ndtr

from .gf_bch import BchCode
from .modem import Constellation, llr


def pre_fec_ber(cons: Constellation, snr_db: float) -> float:
    """Exact average bit error probability of the Gray-mapped hard demapper,
    by enumerating decision intervals around every transmitted point."""
    n0 = 10.0 ** (-snr_db / 10.0)
    sigma = math.sqrt(n0)
    M, m = cons.M, cons.m
    edges = np.concatenate([[-np.inf], cons.mids, [np.inf]])
    total = 0.0
    for i in range(M):
        zhi = (edges[1:] - cons.points[i]) / sigma
        zlo = (edges[:-1] - cons.points[i]) / sigma
        probs = ndtr(zhi) - ndtr(zlo)
        dists = np.count_nonzero(cons.label_bits ^ cons.label_bits[i], axis=1)
        total += float(probs @ dists)
    return total / (M * m)


def hd_air(p: float, m: int) -> float:
    """4m(1 + p log2 p + (1-p) log2(1-p)) with the p->0 limit handled."""
    if not 0.0 <= p <= 0.5:
        raise ValueError("pre-FEC BER must lie in [0, 1/2]")
    ent = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            ent += q * math.log2(q)
    return 4.0 * m * (1.0 + ent)


def gmi(cons: Constellation, snr_db: float, nodes: int = 128) -> float:
    """Bit-metric GMI in bits per 4D symbol via Gauss-Hermite quadrature.

    The bit metric is the exact posterior of the variance-N0 channel, so the
    result is the true BICM rate on the same SNR axis the simulator uses.
    """
    n0 = 10.0 ** (-snr_db / 10.0)
    sigma = math.sqrt(n0)
    xi, wq = np.polynomial.hermite.hermgauss(nodes)
    total = 0.0
    for i in range(cons.M):
        y = cons.points[i] + sigma * math.sqrt(2.0) * xi
        lam = llr(cons, y, 2.0 * n0)
        signs = 2.0 * cons.label_bits[i].astype(np.float64) - 1.0
        loss = np.logaddexp(0.0, -lam * signs[None, :]) / math.log(2.0)
        total += float(wq @ loss.sum(axis=1))
    avg_loss = total / (cons.M * math.sqrt(math.pi))
    return 4.0 * (cons.m - avg_loss)


def gmi_mc(cons: Constellation, snr_db: float, samples: int = 1_000_000,
           seed: int = 0) -> float:
    """Monte Carlo estimate of the same quantity, for cross-checking."""
    n0 = 10.0 ** (-snr_db / 10.0)
    sigma = math.sqrt(n0)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, cons.M, samples)
    y = cons.points[idx] + rng.normal(0.0, sigma, samples)
    lam = llr(cons, y, 2.0 * n0)
    signs = 2.0 * cons.label_bits[idx].astype(np.float64) - 1.0
    loss = np.logaddexp(0.0, -lam * signs) / math.log(2.0)
    return 4.0 * (cons.m - float(loss.sum(axis=1).mean()))


def scc_air(m: int, code: BchCode) -> float:
    """I_SCC = 4 m R with the exact rational staircase rate."""
    rate = (2 * code.kc - code.nc) / code.nc
    return 4.0 * m * rate


def net_rate_gbps(m: int, code: BchCode, baud_gbd: float = 45.0) -> float:
    """Net data rate 4 m R times the symbol rate."""
    return scc_air(m, code) * baud_gbd


def required_snr(target_bits: float, curve, lo_db: float = -15.0,
                 hi_db: float = 40.0, tol_bits: float = 1e-6) -> float:
    """Invert a monotone rate curve (bits per 4D vs SNR dB) by bisection."""
    flo, fhi = curve(lo_db), curve(hi_db)
    if not flo <= target_bits <= fhi:
        raise ValueError(
            f"target {target_bits} outside curve range [{flo}, {fhi}]")
    lo, hi = lo_db, hi_db
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = curve(mid)
        if abs(val - target_bits) < tol_bits:
            return mid
        if val < target_bits:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class AirPoint:
    snr_db: float
    pre_ber: float
    i_hd: float
    i_gmi: float


def air_table(cons: Constellation, snr_grid) -> list[AirPoint]:
    out = []
    for s in snr_grid:
        p = pre_fec_ber(cons, s)
        out.append(AirPoint(snr_db=float(s), pre_ber=p,
                            i_hd=hd_air(min(p, 0.5), cons.m),
                            i_gmi=gmi(cons, s)))
    return out


@dataclass(frozen=True)
class LinkParams:
    span_km: float = 80.0
    loss_db_km: float = 0.2
    dispersion_ps_nm_km: float = 17.0
    gamma_w_km: float = 1.2
    nf_db: float = 5.0
    baud_gbd: float = 45.0
    channels: int = 11
    spacing_ghz: float = 50.0
    wavelength_nm: float = 1550.0

    def __post_init__(self):
        for name in ("span_km", "loss_db_km", "dispersion_ps_nm_km",
                     "gamma_w_km", "nf_db", "baud_gbd", "channels",
                     "spacing_ghz", "wavelength_nm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _gn_coefficients(link: LinkParams) -> tuple[float, float]:
    """Per-span ASE power (W) and NLI coefficient eta (1/W^2) in the symbol
    rate bandwidth."""
    alpha = link.loss_db_km * math.log(10.0) / 10.0 / 1e3
    span_m = link.span_km * 1e3
    leff = (1.0 - math.exp(-alpha * span_m)) / alpha
    leffa = 1.0 / alpha
    lam = link.wavelength_nm * 1e-9
    beta2 = link.dispersion_ps_nm_km * 1e-6 * lam**2 / (2.0 * math.pi * _C_LIGHT)
    gamma = link.gamma_w_km / 1e3
    rs = link.baud_gbd * 1e9
    ratio = 2.0 * rs / (link.spacing_ghz * 1e9)
    psi = math.asinh(0.5 * math.pi**2 * beta2 * leffa * rs**2
                     * link.channels ** ratio)
    eta = (8.0 / 27.0) * gamma**2 * leff**2 * psi \
        / (math.pi * beta2 * leffa * rs**2)
    gain = 10.0 ** (link.loss_db_km * link.span_km / 10.0)
    nf = 10.0 ** (link.nf_db / 10.0)
    f_c = _C_LIGHT / lam
    p_ase = (gain * nf - 1.0) * _H_PLANCK * f_c * rs
    return p_ase, eta


def ase_nli_powers(link: LinkParams, power_dbm: float) -> tuple[float, float]:
    """Per-span ASE and NLI powers (W) at the given launch power."""
    p_ase, eta = _gn_coefficients(link)
    p = 10.0 ** (power_dbm / 10.0) * 1e-3
    return p_ase, eta * p**3


def _snr_one_span(link: LinkParams, power_dbm: float) -> float:
    p_ase, p_nli = ase_nli_powers(link, power_dbm)
    p = 10.0 ** (power_dbm / 10.0) * 1e-3
    return p / (p_ase + p_nli)


def optimal_launch_power_dbm(link: LinkParams, lo: float = -15.0,
                             hi: float = 15.0, tol: float = 1e-6) -> float:
    """Golden-section maximization of the effective SNR over launch power."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = _snr_one_span(link, x1), _snr_one_span(link, x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = _snr_one_span(link, x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = _snr_one_span(link, x1)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class ReachResult:
    required_snr_db: float
    launch_power_dbm: float
    max_spans: int
    reach_km: float


def gn_reach(link: LinkParams, required_snr_db: float) -> ReachResult:
    """Largest integer span count whose best-power effective SNR still meets
    the requirement; noise accumulates linearly in the span count."""
    p_opt = optimal_launch_power_dbm(link)
    snr1 = _snr_one_span(link, p_opt)
    req = 10.0 ** (required_snr_db / 10.0)
    spans = int(math.floor(snr1 / req))
    if spans < 1:
        raise ValueError(
            f"required SNR {required_snr_db:.2f} dB unreachable at one span "
            f"(best effective SNR {10 * math.log10(snr1):.2f} dB)")
    return ReachResult(required_snr_db=float(required_snr_db),
                       launch_power_dbm=p_opt, max_spans=spans,
                       reach_km=spans * link.span_km)
