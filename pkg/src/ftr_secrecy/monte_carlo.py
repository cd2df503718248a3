"""Monte-Carlo validation oracle for the FTR distribution and both SOPs.

Samples the constituent physical model directly (Gamma-fluctuated
specular pair with uniform phases plus complex Gaussian diffuse scatter)
rather than any series expansion, so estimates are independent of the
analytic layer they validate.

Reproducibility: every batch draws from a counter-based Philox stream
keyed by (seed, stream index), so results are bit-identical for a fixed
(seed, samples, batch_size) regardless of scheduling or thread count;
batch tallies are integers, which makes the reduction order immaterial.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ftr_model import FtrParams, LinkBudget
from .secrecy import SecrecyScenario

__all__ = [
    "McConfig",
    "McEstimate",
    "InsufficientConditioningSamples",
    "sample_ftr_snr",
    "batch_generator",
    "mc_modified_sop",
    "mc_modified_counts",
    "mc_conventional_sop",
]

_MIN_SURVIVORS = 100


class InsufficientConditioningSamples(RuntimeError):
    """Too few samples passed the reliability threshold to estimate the
    conditional probability (mu too large for the sample budget)."""


@dataclass(frozen=True)
class McConfig:
    """Sample count, seed, and batching policy.

    batch_size defaults to min(samples, 1_000_000).
    """

    samples: int
    seed: int
    batch_size: int | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.batch_size is None:
            object.__setattr__(self, "batch_size", min(self.samples, 1_000_000))
        if not 1 <= self.batch_size <= self.samples:
            raise ValueError("batch_size must be in [1, samples]")


@dataclass(frozen=True)
class McEstimate:
    """Bernoulli proportion estimate with its standard error."""

    value: float
    std_error: float
    effective_samples: int


def _estimate(successes: int, trials: int) -> McEstimate:
    value = successes / trials
    return McEstimate(
        value=value,
        std_error=math.sqrt(value * (1.0 - value) / trials),
        effective_samples=trials,
    )


def batch_generator(seed: int, stream: int) -> np.random.Generator:
    """Philox generator keyed by (seed, stream); independent per key."""
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_ftr_snr(
    p: FtrParams,
    budget: LinkBudget,
    rng: np.random.Generator,
    n: int | None = None,
):
    """Draw FTR SNR samples from the constituent model.

    The specular amplitudes satisfy (V1^2+V2^2)/(2 sigma^2) = K and
    2 V1 V2/(V1^2+V2^2) = delta; both are modulated by a common
    unit-mean Gamma(m) power factor, with independent uniform phases and
    a complex Gaussian diffuse term of per-component variance sigma^2.
    The sample mean converges to (P_t/N_0)(1+K) * 2 sigma^2.

    Returns a scalar when n is None, else an ndarray of length n.
    """
    size = 1 if n is None else int(n)
    root = math.sqrt(1.0 - p.delta * p.delta)
    v1 = math.sqrt(p.sigma2 * p.k_ratio * (1.0 + root))
    v2 = math.sqrt(p.sigma2 * p.k_ratio * (1.0 - root))
    sigma = math.sqrt(p.sigma2)

    zeta = rng.gamma(p.m, 1.0 / p.m, size)
    phases = rng.uniform(0.0, 2.0 * math.pi, (2, size))
    diffuse = rng.standard_normal((2, size))
    field = np.sqrt(zeta) * (v1 * np.exp(1j * phases[0]) + v2 * np.exp(1j * phases[1]))
    field += sigma * (diffuse[0] + 1j * diffuse[1])
    gamma = budget.pt_over_n0 * np.abs(field) ** 2
    return float(gamma[0]) if n is None else gamma


def _batch_sizes(cfg: McConfig):
    full, rem = divmod(cfg.samples, cfg.batch_size)
    sizes = [cfg.batch_size] * full
    if rem:
        sizes.append(rem)
    return sizes


def _paired_tallies(
    s: SecrecyScenario,
    budget_d: LinkBudget,
    budget_e: LinkBudget,
    cfg: McConfig,
    threads: int,
) -> tuple[int, int, int]:
    """(survivors, leaked, conventional) event counts over all batches.

    survivors    : gamma_d > mu
    leaked       : mu < gamma_d < lam - 1 + lam * gamma_e
    conventional : gamma_d <= lam - 1 + lam * gamma_e
    """
    lam, mu = s.cfg.lam, s.cfg.mu

    def run(batch: tuple[int, int]) -> tuple[int, int, int]:
        index, size = batch
        gd = sample_ftr_snr(s.d_link, budget_d, batch_generator(cfg.seed, 2 * index), size)
        ge = sample_ftr_snr(s.e_link, budget_e, batch_generator(cfg.seed, 2 * index + 1), size)
        wiretap = lam - 1.0 + lam * ge
        reliable = gd > mu
        return (
            int(reliable.sum()),
            int((reliable & (gd < wiretap)).sum()),
            int((gd <= wiretap).sum()),
        )

    batches = list(enumerate(_batch_sizes(cfg)))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, batches))
    else:
        results = [run(b) for b in batches]
    survivors = sum(r[0] for r in results)
    leaked = sum(r[1] for r in results)
    conventional = sum(r[2] for r in results)
    return survivors, leaked, conventional


def mc_modified_counts(
    s: SecrecyScenario,
    budget_d: LinkBudget = LinkBudget(1.0),
    budget_e: LinkBudget = LinkBudget(1.0),
    cfg: McConfig = McConfig(samples=1_000_000, seed=0),
    threads: int = 1,
) -> tuple[int, int, int]:
    """(leaked, kept, survivors) counts; leaked + kept == survivors."""
    survivors, leaked, _ = _paired_tallies(s, budget_d, budget_e, cfg, threads)
    return leaked, survivors - leaked, survivors


def mc_modified_sop(
    s: SecrecyScenario,
    budget_d: LinkBudget = LinkBudget(1.0),
    budget_e: LinkBudget = LinkBudget(1.0),
    cfg: McConfig = McConfig(samples=1_000_000, seed=0),
    threads: int = 1,
) -> McEstimate:
    """Empirical modified SOP with its conditional standard error."""
    survivors, leaked, _ = _paired_tallies(s, budget_d, budget_e, cfg, threads)
    if survivors < _MIN_SURVIVORS:
        raise InsufficientConditioningSamples(
            f"only {survivors} of {cfg.samples} samples exceeded mu={s.cfg.mu}; "
            f"need at least {_MIN_SURVIVORS}"
        )
    return _estimate(leaked, survivors)


def mc_conventional_sop(
    s: SecrecyScenario,
    budget_d: LinkBudget = LinkBudget(1.0),
    budget_e: LinkBudget = LinkBudget(1.0),
    cfg: McConfig = McConfig(samples=1_000_000, seed=0),
    threads: int = 1,
) -> McEstimate:
    """Empirical conventional SOP Pr{C_s < R_s}; unconditional."""
    _, _, conventional = _paired_tallies(s, budget_d, budget_e, cfg, threads)
    return _estimate(conventional, cfg.samples)
