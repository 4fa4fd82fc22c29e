"""Stochastic stand-ins for the vision models, calibrated to the published
accuracy benchmarks (mean / sd / min / max per model family).

Each simulation run realizes one accuracy level for its classifier by
sampling a truncated normal via rejection inside the published [min, max]
band. Asymmetric bands pull a plain truncated normal's mean off the
published mean (for the weakest family by almost a full point), so the
pre-truncation center is re-solved once per spec so that the *realized*
mean equals the published mean. Per-item classification is then a Bernoulli
at the run's accuracy, with wrong answers drawn uniformly from the decoys.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "ClassifierSpec",
    "ClassifierInstance",
    "BUILTIN_SPECS",
    "builtin_spec",
    "instantiate",
    "classify",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _phi(z: float) -> float:
    return math.exp(-0.5 * z * z) * _INV_SQRT_2PI


def _cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


@dataclass(frozen=True)
class ClassifierSpec:
    """Published accuracy profile of one model family, in percent."""

    name: str
    mean_acc: float
    sd_acc: float
    min_acc: float
    max_acc: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.min_acc <= self.mean_acc <= self.max_acc <= 100.0):
            raise ValueError(
                f"{self.name}: need 0 <= min <= mean <= max <= 100, got "
                f"{self.min_acc}/{self.mean_acc}/{self.max_acc}"
            )
        if self.sd_acc <= 0.0:
            raise ValueError(f"{self.name}: sd_acc must be positive")


@dataclass(frozen=True)
class ClassifierInstance:
    """One run's realized classifier: a fixed accuracy in [0, 1]."""

    spec: ClassifierSpec
    run_accuracy: float

    def __post_init__(self) -> None:
        if not (self.spec.min_acc / 100.0 <= self.run_accuracy <= self.spec.max_acc / 100.0):
            raise ValueError(
                f"run_accuracy {self.run_accuracy} outside "
                f"[{self.spec.min_acc / 100.0}, {self.spec.max_acc / 100.0}]"
            )


BUILTIN_SPECS: dict[str, ClassifierSpec] = {
    "CNN": ClassifierSpec("CNN", 95.0, 3.0, 88.0, 100.0),
    "RNN": ClassifierSpec("RNN", 90.0, 5.0, 80.0, 97.0),
    "Traditional": ClassifierSpec("Traditional", 75.0, 7.0, 60.0, 85.0),
}


def builtin_spec(name: str) -> ClassifierSpec:
    try:
        return BUILTIN_SPECS[name]
    except KeyError:
        raise KeyError(
            f"unknown classifier {name!r}; expected one of {sorted(BUILTIN_SPECS)}"
        ) from None


def _truncated_mean(mu: float, sd: float, lo: float, hi: float) -> float:
    a = (lo - mu) / sd
    b = (hi - mu) / sd
    mass = _cdf(b) - _cdf(a)
    if mass <= 0.0:  # numerically empty window; nearest bound
        return lo if mu < lo else hi
    return mu + sd * (_phi(a) - _phi(b)) / mass


@lru_cache(maxsize=None)
def _centered_mu(mean: float, sd: float, lo: float, hi: float) -> float:
    """Pre-truncation center whose [lo, hi]-truncated mean equals `mean`."""
    span = max(hi - lo, sd)
    a, b = mean - 6.0 * span, mean + 6.0 * span
    for _ in range(200):
        mid = 0.5 * (a + b)
        if _truncated_mean(mid, sd, lo, hi) < mean:
            a = mid
        else:
            b = mid
        if b - a < 1e-12 * span:
            break
    return 0.5 * (a + b)


def instantiate(spec: ClassifierSpec, rng: random.Random) -> ClassifierInstance:
    """Realize one run's accuracy by rejection sampling inside the band.

    Always terminates: the sampling center sits inside [min, max]. A
    zero-width band short-circuits to its single admissible value.
    """
    if spec.min_acc == spec.max_acc:
        return ClassifierInstance(spec, spec.min_acc / 100.0)
    mu = _centered_mu(spec.mean_acc, spec.sd_acc, spec.min_acc, spec.max_acc)
    while True:
        draw = rng.normalvariate(mu, spec.sd_acc)
        if spec.min_acc <= draw <= spec.max_acc:
            return ClassifierInstance(spec, draw / 100.0)


def classify(
    inst: ClassifierInstance,
    true_sku: str,
    decoys: list[str],
    rng: random.Random,
) -> str:
    """Return the true sku with probability run_accuracy, else a uniform decoy."""
    if not decoys:
        raise ValueError("decoy list must be non-empty")
    if true_sku in decoys:
        raise ValueError(f"true sku {true_sku!r} must not appear among decoys")
    if rng.random() < inst.run_accuracy:
        return true_sku
    return decoys[rng.randrange(len(decoys))]
