"""Secrecy-outage layer: closed forms, quadrature cross-checks, asymptotics.

The outage-conditioned ("modified") secrecy outage probability is

    SOP = Pr{ C_e > C_d - R_s | gamma_d > mu }
        = Pr{ mu < gamma_d < lam - 1 + lam * gamma_e } / Pr{ gamma_d > mu }

with lam = 2**R_s. The closed form expands the destination CDF inside
the eavesdropper expectation into a quadruple sum with upper
incomplete-gamma weights; the quadrature route integrates the
distribution layer directly and is kept fully independent of that
algebra so the two can cross-validate. The conventional definition
Pr{C_s < R_s} and the high-average-SNR asymptote (linear in the inverse
destination scale, hence unit secrecy diversity order) are also
provided.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .ftr_model import (
    DEFAULT_TRUNCATION,
    FtrParams,
    LinkBudget,
    Truncation,
    TruncationError,
    _adaptive_ln_sum,
    _d_ln,
    _lgamma_vec,
    _ln_weights,
    d0,
    ftr_ccdf,
    ftr_ln_ccdf,
    ftr_pdf,
    sigma2_from_avg_snr,
)
from .special_functions import log_add, ln_gamma

__all__ = [
    "SecrecyConfig",
    "SecrecyScenario",
    "QuadratureError",
    "modified_sop",
    "modified_sop_quadrature",
    "conventional_sop",
    "asop",
    "diversity_order",
    "scenario_from_avg_snr",
]

logger = logging.getLogger(__name__)


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""


@dataclass(frozen=True)
class SecrecyConfig:
    """Secrecy rate and reliability threshold.

    rs : confidential rate in bits per channel use, >= 0
    mu : destination-SNR threshold gating transmission, >= 0

    The SNR-domain rate factor lam = 2**rs is derived, never stored.
    """

    rs: float
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.rs) and self.rs >= 0.0):
            raise ValueError(f"rs must be >= 0 and finite, got {self.rs!r}")
        if not (math.isfinite(self.mu) and self.mu >= 0.0):
            raise ValueError(f"mu must be >= 0 and finite, got {self.mu!r}")

    @property
    def lam(self) -> float:
        return 2.0 ** self.rs


@dataclass(frozen=True)
class SecrecyScenario:
    """Independent destination and eavesdropper links plus the secrecy config.

    Link sigma2 values are understood on the SNR scale (the mean of
    gamma_t is (1+K_t) * 2 sigma_t^2).
    """

    d_link: FtrParams
    e_link: FtrParams
    cfg: SecrecyConfig
    trunc: Truncation = DEFAULT_TRUNCATION


def scenario_from_avg_snr(
    m: float,
    k_ratio: float,
    delta: float,
    gamma_d_db: float,
    gamma_e_db: float,
    rs: float,
    mu: float,
    m_e: float | None = None,
    k_e: float | None = None,
    delta_e: float | None = None,
    trunc: Truncation = DEFAULT_TRUNCATION,
) -> SecrecyScenario:
    """Scenario with link scales set from average SNRs in dB.

    Eavesdropper fading parameters default to the destination's.
    """
    m_e = m if m_e is None else m_e
    k_e = k_ratio if k_e is None else k_e
    delta_e = delta if delta_e is None else delta_e
    unit = LinkBudget(1.0)
    d_probe = FtrParams(m, k_ratio, delta, 1.0)
    e_probe = FtrParams(m_e, k_e, delta_e, 1.0)
    d_link = replace(d_probe, sigma2=sigma2_from_avg_snr(gamma_d_db, unit, d_probe))
    e_link = replace(e_probe, sigma2=sigma2_from_avg_snr(gamma_e_db, unit, e_probe))
    return SecrecyScenario(d_link, e_link, SecrecyConfig(rs=rs, mu=mu), trunc)


# ---------------------------------------------------------------------------
# closed form
# ---------------------------------------------------------------------------


class _LnUpperGammaTable:
    """ln Gamma(n, x0) for integer n >= 1, grown on demand.

    Uses Gamma(n+1, x0) = n Gamma(n, x0) + x0^n exp(-x0); every quantity
    is positive so the recurrence is stable at any depth.
    """

    def __init__(self, x0: float):
        self._x0 = x0
        self._ln_x0 = math.log(x0) if x0 > 0.0 else -math.inf
        self._vals = [-x0]  # ln Gamma(1, x0)

    def upto(self, n: int) -> np.ndarray:
        """Array a with a[k] = ln Gamma(k+1, x0) for k in [0, n)."""
        while len(self._vals) < n:
            k = len(self._vals)  # have Gamma(k, x0), want Gamma(k+1, x0)
            self._vals.append(
                log_add(math.log(k) + self._vals[-1], k * self._ln_x0 - self._x0)
            )
        return np.asarray(self._vals[:n])


def _ln_const(p: FtrParams) -> float:
    """ln of m^m / Gamma(m)."""
    return p.m * math.log(p.m) - ln_gamma(p.m)


def _e_moment_series_ln(
    e: FtrParams, k: int, gam_tab: _LnUpperGammaTable, ln_b: float, trunc: Truncation
) -> float:
    """ln E[gamma_e^k exp(-(B - 1/(2 sigma_e^2)) gamma_e); gamma_e > theta].

    Series form: (m^m/Gamma(m)) sum_j K^j d_j Gamma(j+k+1, B*theta)
    / (j!^2 (2 sigma_e^2)^{j+1} B^{j+k+1}).
    """
    ln_c = _ln_const(e)
    ln_se = math.log(e.scale)
    ln_k_ratio = math.log(e.k_ratio) if e.k_ratio > 0.0 else -math.inf

    def build(n: int) -> np.ndarray:
        lnd = _d_ln(e, n)
        gam = gam_tab.upto(n + k + 1)
        j = np.arange(n)
        shapes = j + k + 1
        out = (
            lnd
            - 2.0 * _lgamma_vec(n)
            - (j + 1.0) * ln_se
            + gam[shapes - 1]
            - shapes * ln_b
        )
        if e.k_ratio > 0.0:
            out = out + j * ln_k_ratio
        else:
            out = np.where(j == 0, out, -math.inf)
        return out + ln_c

    return _adaptive_ln_sum(build, trunc, f"secrecy e-link series (k={k})")


def _modified_series_ln(s: SecrecyScenario, theta: float) -> float:
    """ln of the quadruple-series term of the closed-form modified SOP,
    including the m_d^{m_d}/Gamma(m_d) factor (division by the
    destination CCDF is left to the caller)."""
    d, e, cfg, trunc = s.d_link, s.e_link, s.cfg, s.trunc
    lam = cfg.lam
    sd = d.scale
    ln_sd = math.log(sd)
    ln_lam = math.log(lam)
    ln_lam1 = math.log(lam - 1.0) if lam > 1.0 else -math.inf
    b_rate = lam / sd + 1.0 / e.scale
    ln_b = math.log(b_rate)
    gam_tab = _LnUpperGammaTable(b_rate * theta)

    e_ln: list[float] = []  # ln E_k, grown with the n sum

    def _t_term(n: int) -> float:
        """ln T_n: the n-th reliability-threshold expansion term."""
        while len(e_ln) <= n:
            e_ln.append(_e_moment_series_ln(e, len(e_ln), gam_tab, ln_b, trunc))
        pref = -(lam - 1.0) / sd - math.lgamma(n + 1) - n * ln_sd
        if lam == 1.0:
            return pref + e_ln[n]
        ln_cnk = 0.0  # ln C(n, 0)
        total = -math.inf
        for k in range(n + 1):
            if k > 0:
                ln_cnk += math.log(n - k + 1) - math.log(k)
            total = log_add(total, ln_cnk + (n - k) * ln_lam1 + k * ln_lam + e_ln[k])
        return pref + total

    # inner sum over n, truncated by the same policy as the j series
    t_ln: list[float] = []
    s_ln: list[float] = []  # prefix sums of exp(t_ln)
    run = -math.inf
    small = 0
    for n in range(trunc.max_terms):
        t = _t_term(n)
        run = log_add(run, t)
        t_ln.append(t)
        s_ln.append(run)
        if t <= math.log(trunc.rel_tol) + run:
            small += 1
            if small >= trunc.tail_run:
                break
        else:
            small = 0
    else:
        raise TruncationError(
            f"modified_sop reliability expansion: tail criterion unmet after "
            f"{trunc.max_terms} terms"
        )

    n_t = len(s_ln)
    s_arr = np.asarray(s_ln)
    ln_kd = math.log(d.k_ratio) if d.k_ratio > 0.0 else -math.inf

    def build(n: int) -> np.ndarray:
        lnd = _d_ln(d, n)
        j = np.arange(n)
        out = lnd - _lgamma_vec(n) + s_arr[np.minimum(j, n_t - 1)]
        if d.k_ratio > 0.0:
            out = out + j * ln_kd
        else:
            out = np.where(j == 0, out, -math.inf)
        return out

    return _ln_const(d) + _adaptive_ln_sum(build, trunc, "modified_sop main series")


def _clamp_unit(value: float, what: str) -> float:
    if value < 0.0 or value > 1.0:
        clamped = min(1.0, max(0.0, value))
        if abs(value - clamped) > 1e-9:
            logger.warning("%s clamped %.6e to [0, 1]", what, value)
        return clamped
    return value


def modified_sop(s: SecrecyScenario) -> float:
    """Closed-form outage-conditioned secrecy outage probability.

    Evaluates the eavesdropper CCDF at theta = (mu+1)/lam - 1 minus the
    quadruple series divided by the destination CCDF at mu. When
    mu < lam - 1 the threshold theta is negative and clamps to 0, since
    the eavesdropper SNR cannot be negative. The CCDF ratio is formed
    in log space so arbitrarily selective thresholds stay finite.
    """
    theta = max(0.0, (s.cfg.mu + 1.0) / s.cfg.lam - 1.0)
    ccdf_e_theta = ftr_ccdf(s.e_link, theta, s.trunc)
    ln_ccdf_d_mu = ftr_ln_ccdf(s.d_link, s.cfg.mu, s.trunc)
    value = ccdf_e_theta - math.exp(_modified_series_ln(s, theta) - ln_ccdf_d_mu)
    return _clamp_unit(value, "modified_sop")


# ---------------------------------------------------------------------------
# quadrature routes
# ---------------------------------------------------------------------------


def _quad(f, lo: float, hi: float) -> float:
    out = quad(f, lo, hi, epsabs=1e-10, epsrel=1e-10, limit=400, full_output=1)
    if len(out) > 3:
        raise QuadratureError(f"quadrature on [{lo}, {hi}]: {out[3]}")
    value, abserr = out[0], out[1]
    if abserr > 1e-6:
        raise QuadratureError(
            f"quadrature on [{lo}, {hi}]: error estimate {abserr:.2e} too large"
        )
    return value


_TAIL_DROP_LN = math.log(1e-13)


def _e_tail_limits(e: FtrParams, lo: float, trunc: Truncation) -> tuple[float, float]:
    """(split, upper) integration limits above lo.

    upper is chosen so the eavesdropper CCDF there is below 1e-13; since
    every integrand used here is bounded by the eavesdropper density,
    dropping [upper, inf) biases the integral by less than 1e-13, well
    under the 1e-6 agreement tolerance. The finite upper limit also
    keeps the destination-series depth within the truncation cap.
    """
    z = e.k_ratio * (1.0 + e.delta)
    step = e.scale * (e.m + z) / e.m
    upper = lo + 10.0 * step
    for _ in range(80):
        if ftr_ln_ccdf(e, upper, trunc) <= _TAIL_DROP_LN:
            break
        upper *= 1.25
    return lo + 4.0 * step, upper


def modified_sop_quadrature(s: SecrecyScenario) -> float:
    """Modified SOP from its integral definition, independent of the
    closed-form algebra.

    Integrates Pr{mu < gamma_d <= lam-1+lam*y | gamma_d > mu} against
    the eavesdropper density over y >= max(0, theta). The conditional
    probability is formed as -expm1(ln CCDF_d(lam-1+lam*y) - ln
    CCDF_d(mu)), which stays finite for any threshold; the boundary term
    of the two-term textbook split is absorbed by the conditioning.
    """
    d, e, cfg, trunc = s.d_link, s.e_link, s.cfg, s.trunc
    lam = cfg.lam
    theta = max(0.0, (cfg.mu + 1.0) / lam - 1.0)
    ln_ccdf_d_mu = ftr_ln_ccdf(d, cfg.mu, trunc)

    def integrand(y: float) -> float:
        b = lam - 1.0 + lam * y
        arg = min(0.0, ftr_ln_ccdf(d, b, trunc) - ln_ccdf_d_mu)
        return -math.expm1(arg) * ftr_pdf(e, y, trunc)

    y_split, y_max = _e_tail_limits(e, theta, trunc)
    return _quad(integrand, theta, y_split) + _quad(integrand, y_split, y_max)


def conventional_sop(s: SecrecyScenario) -> float:
    """Pr{log2(1+gamma_d) - log2(1+gamma_e) <= R_s} by adaptive quadrature.

    The reliability threshold mu plays no role in this definition.
    """
    d, e, cfg, trunc = s.d_link, s.e_link, s.cfg, s.trunc
    lam = cfg.lam

    def integrand(y: float) -> float:
        b = lam - 1.0 + lam * y
        return -math.expm1(ftr_ln_ccdf(d, b, trunc)) * ftr_pdf(e, y, trunc)

    y_split, y_max = _e_tail_limits(e, 0.0, trunc)
    return _quad(integrand, 0.0, y_split) + _quad(integrand, y_split, y_max)


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------


def asop(s: SecrecyScenario, incomplete_gamma_arg: str = "rate") -> float:
    """Asymptotic modified SOP, leading order in the inverse destination
    scale (exact slope -1 on a log-log average-SNR axis).

    incomplete_gamma_arg selects the argument scaling of the
    eavesdropper incomplete-gamma weights: "rate" uses
    theta/(2 sigma_e^2), which the expectation over the eavesdropper
    density produces; "product" uses theta * 2 sigma_e^2 and exists only
    so the two can be compared numerically (see the high-SNR agreement
    test, which the product form fails).
    """
    if incomplete_gamma_arg not in ("rate", "product"):
        raise ValueError(f"unknown incomplete_gamma_arg {incomplete_gamma_arg!r}")
    d, e, cfg, trunc = s.d_link, s.e_link, s.cfg, s.trunc
    lam = cfg.lam
    theta = max(0.0, (cfg.mu + 1.0) / lam - 1.0)
    se = e.scale
    x1 = theta / se if incomplete_gamma_arg == "rate" else theta * se
    gam_tab = _LnUpperGammaTable(x1)
    ln_ke = math.log(e.k_ratio) if e.k_ratio > 0.0 else -math.inf

    def build(n: int) -> np.ndarray:
        lnd = _d_ln(e, n)
        gam = gam_tab.upto(n + 2)
        j = np.arange(n)
        out = lnd - 2.0 * _lgamma_vec(n) + gam[j + 1]
        if e.k_ratio > 0.0:
            out = out + j * ln_ke
        else:
            out = np.where(j == 0, out, -math.inf)
        return out

    w = math.exp(_adaptive_ln_sum(build, trunc, "asop e-link series"))
    lead = math.exp(_ln_const(d) + math.log(d0(d)))
    ccdf_e_theta = ftr_ccdf(e, theta, trunc)
    c_e = math.exp(_ln_const(e))
    return (lead / d.scale) * ((lam - 1.0 - cfg.mu) * ccdf_e_theta + lam * se * c_e * w)


def diversity_order(
    s: SecrecyScenario,
    db_lo: float,
    db_hi: float,
    budget: LinkBudget = LinkBudget(1.0),
    method: str = "exact",
) -> float:
    """Slope-based secrecy diversity estimate between two average SNRs.

    Returns -(log10 SOP(hi) - log10 SOP(lo)) / ((hi - lo)/10) with the
    destination scale set from each dB point; method "exact" uses the
    closed-form modified SOP, "asymptotic" uses the asymptote (whose
    slope is exactly one).
    """
    if not (math.isfinite(db_lo) and math.isfinite(db_hi)) or db_hi <= db_lo:
        raise ValueError(f"need db_hi > db_lo, got {db_lo!r}, {db_hi!r}")
    if method not in ("exact", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")
    sops = []
    for db in (db_lo, db_hi):
        sigma2 = budget.pt_over_n0 * sigma2_from_avg_snr(db, budget, s.d_link)
        scen = replace(s, d_link=replace(s.d_link, sigma2=sigma2))
        value = modified_sop(scen) if method == "exact" else asop(scen)
        if value <= 0.0:
            raise ArithmeticError(f"SOP underflowed to {value!r} at {db} dB")
        sops.append(value)
    return -(math.log10(sops[1]) - math.log10(sops[0])) / ((db_hi - db_lo) / 10.0)
