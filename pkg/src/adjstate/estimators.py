"""Estimating motif success probabilities and recovering counts.

Two estimators of ``p = #S / (2|E|)**e_s`` are simulated from the exact
``p`` rather than from a statevector:

* POVM: ``T`` independent two-outcome measurements, i.e. a binomial draw,
  with ``T`` chosen by Hoeffding's inequality;
* amplitude estimation (AE): writing ``p = sin^2(theta)``, the estimate of
  ``theta`` is perturbed by ``O(1/M)`` after ``M`` oracle queries.

AE perturbation models (``ae_mode``), all with ``eta ~ U[-scale/M, scale/M]``:

``proportional`` (default)
    ``theta + sin(theta) * eta``: the shift scales with the amplitude
    ``sqrt(p)``, so rare motifs keep a small relative error.
``additive``
    ``theta + eta``: a fixed-size shift, which swamps ``p`` once
    ``sqrt(p) << 1/M``.
``grid``
    sample the textbook phase-estimation readout on ``M`` grid points.

The first two clip ``theta`` to ``[0, pi/2]`` and never move ``p`` by more
than ``scale / M``, because ``sin^2`` is 1-Lipschitz.

``M = ceil(ln(2/delta) / epsilon)`` is a convention of this package; only its
order ``O(log(1/delta) / epsilon)`` is fixed by theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, MotifKind
from .reference import success_probability

POVM, AE = "povm", "ae"
PROPORTIONAL, ADDITIVE, GRID = "proportional", "additive", "grid"
AE_MODES = (PROPORTIONAL, ADDITIVE, GRID)


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class EstimatorConfig:
    epsilon: float
    delta: float
    method: str = POVM
    ae_perturbation_scale: float = 1.0
    seed: int = 0
    ae_mode: str = PROPORTIONAL

    def __post_init__(self) -> None:
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.method not in (POVM, AE):
            raise ValueError(f"method must be {POVM!r} or {AE!r}")
        if self.ae_perturbation_scale < 0:
            raise ValueError("ae_perturbation_scale must be >= 0")
        if self.ae_mode not in AE_MODES:
            raise ValueError(f"ae_mode must be one of {AE_MODES}")

    @property
    def budget(self) -> int:
        """Shots (POVM) or oracle queries (AE) implied by ``epsilon`` and ``delta``."""
        if self.method == POVM:
            return hoeffding_shots(self.epsilon, self.delta)
        return ae_queries(self.epsilon, self.delta)


@dataclass(frozen=True)
class EstimateResult:
    p_hat: float
    count_hat: float
    shots_or_queries: int
    method: str


def hoeffding_shots(epsilon: float, delta: float) -> int:
    """Smallest ``T`` with ``2 exp(-2 T epsilon^2) <= delta``."""
    return math.ceil(math.log(2 / delta) / (2 * epsilon**2))


def ae_queries(epsilon: float, delta: float) -> int:
    return math.ceil(math.log(2 / delta) / epsilon)


def povm_estimate(p: float, shots: int, rng) -> float:
    if shots < 1:
        raise ValueError("need at least one shot")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return make_rng(rng).binomial(shots, p) / shots


def ae_estimate(p: float, queries: int, rng, scale: float = 1.0, mode: str = PROPORTIONAL) -> float:
    """Simulated amplitude-estimation output for success probability ``p``.

    ``scale`` is unused in ``grid`` mode, which returns ``sin^2(pi y / M)``
    for a sampled phase-estimation outcome ``y``.
    """
    if queries < 1:
        raise ValueError("need at least one query")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if mode not in AE_MODES:
        raise ValueError(f"unknown AE mode {mode!r}")
    rng = make_rng(rng)
    theta = math.asin(math.sqrt(p))
    if mode == GRID:
        y = rng.choice(queries, p=_grid_distribution(theta, queries))
        return math.sin(math.pi * y / queries) ** 2
    eta = rng.uniform(-scale / queries, scale / queries) if scale else 0.0
    if mode == PROPORTIONAL:
        eta *= math.sqrt(p)
    theta_hat = min(max(theta + eta, 0.0), math.pi / 2)
    if theta_hat == theta:
        return p
    return math.sin(theta_hat) ** 2


def _grid_distribution(theta: float, m: int) -> np.ndarray:
    # Grover eigenphases are +-theta/pi (in turns); each contributes a Fejer kernel
    y = np.arange(m)
    phase = theta / np.pi
    probs = 0.5 * (_fejer(y / m - phase, m) + _fejer(y / m + phase, m))
    return probs / probs.sum()


def _fejer(x: np.ndarray, m: int) -> np.ndarray:
    den = np.sin(np.pi * x)
    out = np.ones_like(x)
    nz = np.abs(den) > 1e-15
    out[nz] = (np.sin(m * np.pi * x[nz]) / (m * den[nz])) ** 2
    return out


def estimate_probability(p: float, cfg: EstimatorConfig, rng=None) -> tuple[float, int]:
    rng = make_rng(cfg.seed if rng is None else rng)
    budget = cfg.budget
    if cfg.method == POVM:
        return povm_estimate(p, budget, rng), budget
    return ae_estimate(p, budget, rng, cfg.ae_perturbation_scale, cfg.ae_mode), budget


def estimate_count(g: Graph, kind: MotifKind, cfg: EstimatorConfig, rng=None) -> EstimateResult:
    """Estimate ``#S`` in ``g`` by estimating ``p`` and scaling by ``(2|E|)**e_s``."""
    sp = success_probability(g, kind)
    p_hat, used = estimate_probability(sp.value, cfg, rng)
    return EstimateResult(p_hat, scale_to_count(p_hat, sp), used, cfg.method)


def scale_to_count(p_hat: float, sp) -> float:
    # an estimate equal to p maps back to the exact count, free of rounding
    if p_hat == sp.value:
        return float(sp.numerator)
    return p_hat * sp.denominator
