"""Monte Carlo urn histories and the Gaussian-limit check against the exact law."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from scipy.stats import norm

from urnlab.engines.exact import exact_distribution, float_distribution, float_support
from urnlab.engines.urn import UrnSpec, validate
from urnlab.errors import DegenerateDistribution, OutOfRange

logger = logging.getLogger(__name__)

EXACT_LIMIT = 200


@dataclass(frozen=True)
class SimConfig:
    trials: int
    horizon: int
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise OutOfRange(f"trials must be >= 1, got {self.trials}")
        if self.horizon < 0:
            raise OutOfRange(f"horizon must be >= 0, got {self.horizon}")


@dataclass
class EmpiricalDistribution:
    n: int
    trials: int
    counts: Dict[int, int] = field(default_factory=dict)

    def probability(self, x: int) -> float:
        return self.counts.get(x, 0) / self.trials

    def mean(self) -> float:
        return sum(x * c for x, c in self.counts.items()) / self.trials

    def variance(self) -> float:
        mu = self.mean()
        return sum((x - mu) ** 2 * c for x, c in self.counts.items()) / self.trials

    def merge(self, other: "EmpiricalDistribution") -> "EmpiricalDistribution":
        if other.n != self.n:
            raise ValueError("cannot merge histograms taken at different times")
        merged = Counter(self.counts)
        merged.update(other.counts)
        return EmpiricalDistribution(self.n, self.trials + other.trials, dict(merged))

    def to_rows(self) -> List[Tuple[int, int, float]]:
        """CSV rows: x, count, frequency."""
        return [(x, c, c / self.trials) for x, c in sorted(self.counts.items())]


def simulate(spec: UrnSpec, config: SimConfig) -> EmpiricalDistribution:
    """Run config.trials independent histories to time config.horizon."""
    validate(spec)
    rng = np.random.default_rng(config.seed)
    black = np.full(config.trials, spec.a0, dtype=np.int64)
    for m in range(config.horizon):
        total = spec.size_at(m)
        drew_black = rng.random(config.trials) * total < black
        black = np.where(drew_black, black - spec.a, black + spec.b + spec.s)
    values, counts = np.unique(black, return_counts=True)
    logger.debug("simulated %d histories of %s to n=%d", config.trials, spec.label(), config.horizon)
    return EmpiricalDistribution(
        n=config.horizon,
        trials=config.trials,
        counts={int(x): int(c) for x, c in zip(values, counts)},
    )


@dataclass(frozen=True)
class CltReport:
    n: int
    ks_distance: float
    mean: float
    variance: float

    def to_dict(self) -> dict:
        return {"n": self.n, "ks_distance": self.ks_distance, "mean": self.mean, "variance": self.variance}


def _law(spec: UrnSpec, n: int) -> Tuple[np.ndarray, np.ndarray]:
    if n <= EXACT_LIMIT:
        dist = exact_distribution(spec, n)
        xs = np.array(dist.support(), dtype=float)
        ps = np.array([float(dist.probs[x]) for x in dist.support()])
        return xs, ps
    probs = float_distribution(spec, n)
    return float_support(spec, probs).astype(float), probs


def ks_to_normal(xs: np.ndarray, ps: np.ndarray, mean: float, sd: float) -> float:
    """sup |F - Phi| for a lattice law, checking both sides of every jump."""
    cdf = np.cumsum(ps)
    before = np.concatenate(([0.0], cdf[:-1]))
    phi = norm.cdf((xs - mean) / sd)
    return float(max(np.max(np.abs(cdf - phi)), np.max(np.abs(before - phi))))


def clt_report(spec: UrnSpec, n: int) -> CltReport:
    """Kolmogorov distance between standardized X_n and the standard normal."""
    validate(spec)
    xs, ps = _law(spec, n)
    mean = float(np.dot(xs, ps))
    variance = float(np.dot((xs - mean) ** 2, ps))
    if variance <= 0:
        raise DegenerateDistribution(f"X_{n} is constant for {spec.label()}")
    ks = ks_to_normal(xs, ps, mean, np.sqrt(variance))
    logger.info("KS distance at n=%d for %s: %.6g", n, spec.label(), ks)
    return CltReport(n=n, ks_distance=ks, mean=mean, variance=variance)
