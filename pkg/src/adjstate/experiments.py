"""Erdos-Renyi sweeps comparing POVM and AE count estimates by normalized RMSE.

A sweep visits every ``(N, p_e)`` pair, samples ``instances`` random graphs,
counts each motif exactly, and runs every estimator on every instance.
Per ``(N, p_e, motif, method, eps, delta)`` cell it reports::

    normalized RMSE = sqrt(mean((X_hat - X)^2)) / mean(X)

with the means taken over instances.

Seeds: every random draw is keyed by :func:`derive_seed`, a BLAKE2b-64
hash of the master seed and the draw's coordinates (``p_e`` enters through
``float.hex``). Adding or reordering cells therefore never changes another
cell's numbers, and results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UndefinedCellError
from .estimators import (
    AE,
    AE_MODES,
    POVM,
    PROPORTIONAL,
    EstimatorConfig,
    estimate_probability,
    make_rng,
    scale_to_count,
)
from .graph import MotifKind, count_motifs, er_generate
from .reference import SuccessProbability

CSV_HEADER = ["n", "p_e", "motif", "method", "eps", "delta", "instances",
              "mean_true_count", "normalized_rmse", "skipped"]
RAW_HEADER = ["n", "p_e", "motif", "method", "eps", "delta", "instance", "edges",
              "true_count", "estimate", "shots_or_queries"]


def derive_seed(*parts) -> int:
    text = "|".join(p.hex() if isinstance(p, float) else str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


def normalized_rmse(estimates, truths) -> float:
    est = np.asarray(estimates, dtype=float)
    tru = np.asarray(truths, dtype=float)
    if est.shape != tru.shape or est.size == 0:
        raise ValueError("need equal-length, non-empty vectors")
    mean = tru.mean()
    if mean <= 0:
        raise UndefinedCellError("mean true count is zero")
    return float(np.sqrt(np.mean((est - tru) ** 2)) / mean)


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple[int, ...] = (16,)
    edge_probs: tuple[float, ...] = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
    instances: int = 100
    motifs: tuple[MotifKind, ...] = (MotifKind.triangle(), MotifKind.cycle(4), MotifKind.clique(4))
    accuracies: tuple[tuple[float, float], ...] = ((0.05, 0.05),)
    methods: tuple[str, ...] = (POVM, AE)
    ae_scale: float = 1.0
    ae_mode: str = PROPORTIONAL
    master_seed: int = 0
    workers: int = 1
    output: str | None = None

    def __post_init__(self) -> None:
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ConfigError("n_values must be positive integers")
        if not self.edge_probs or any(not 0.0 <= p <= 1.0 for p in self.edge_probs):
            raise ConfigError("edge_probs must lie in [0, 1]")
        if self.instances < 2:
            raise ConfigError("instances must be >= 2")
        if not self.motifs:
            raise ConfigError("need at least one motif")
        if any(m not in (POVM, AE) for m in self.methods) or not self.methods:
            raise ConfigError("methods must be drawn from 'povm' and 'ae'")
        if self.ae_mode not in AE_MODES:
            raise ConfigError(f"ae_mode must be one of {AE_MODES}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for eps, delta in self.accuracies:
            try:
                EstimatorConfig(eps, delta)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None


_CONFIG_KEYS = {"n_values", "edge_probs", "instances", "motifs", "accuracies", "epsilon",
                "delta", "methods", "ae_scale", "ae_mode", "master_seed", "workers", "output"}


def parse_sweep_config(text: str) -> SweepConfig:
    """Build a :class:`SweepConfig` from a JSON object.

    ``motifs`` are strings such as ``"cycle:4"``. Accuracy is either
    ``accuracies: [[eps, delta], ...]`` or scalar ``epsilon``/``delta``.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kw = {}
    try:
        if "n_values" in raw:
            kw["n_values"] = tuple(int(n) for n in raw["n_values"])
        if "edge_probs" in raw:
            kw["edge_probs"] = tuple(float(p) for p in raw["edge_probs"])
        if "motifs" in raw:
            kw["motifs"] = tuple(MotifKind.parse(m) for m in raw["motifs"])
        if "accuracies" in raw:
            kw["accuracies"] = tuple((float(e), float(d)) for e, d in raw["accuracies"])
        elif "epsilon" in raw or "delta" in raw:
            kw["accuracies"] = ((float(raw.get("epsilon", 0.05)), float(raw.get("delta", 0.05))),)
        if "methods" in raw:
            kw["methods"] = tuple(str(m) for m in raw["methods"])
        for key, cast in (("instances", int), ("ae_scale", float), ("ae_mode", str),
                          ("master_seed", int), ("workers", int), ("output", str)):
            if key in raw:
                kw[key] = cast(raw[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    return SweepConfig(**kw)


def load_sweep_config(path) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_sweep_config(fh.read())


@dataclass
class CellResult:
    n: int
    p_e: float
    motif: str
    method: str
    eps: float
    delta: float
    instances: int
    mean_true_count: float
    normalized_rmse: float
    skipped: int
    shots_or_queries: int
    truths: list[int] = field(default_factory=list, repr=False)
    estimates: list[float] = field(default_factory=list, repr=False)
    instance_ids: list[int] = field(default_factory=list, repr=False)
    edge_counts: list[int] = field(default_factory=list, repr=False)

    @property
    def undefined(self) -> bool:
        return math.isnan(self.normalized_rmse)

    @property
    def key(self) -> tuple:
        return (self.n, self.p_e, self.motif, self.method, self.eps, self.delta)


@dataclass
class SweepReport:
    cells: list[CellResult] = field(default_factory=list)

    def sorted_cells(self) -> list[CellResult]:
        return sorted(self.cells, key=lambda c: c.key)

    def cell(self, n, p_e, motif, method, eps=0.05, delta=0.05) -> CellResult:
        key = (n, p_e, str(motif), method, eps, delta)
        for c in self.cells:
            if c.key == key:
                return c
        raise KeyError(key)


def _run_unit(cfg: SweepConfig, n: int, p_e: float) -> list[CellResult]:
    graphs = []
    for i in range(cfg.instances):
        g = er_generate(n, p_e, derive_seed(cfg.master_seed, "graph", n, p_e, i))
        graphs.append((i, g))
    kept = [(i, g) for i, g in graphs if g.edge_count > 0]
    skipped = len(graphs) - len(kept)

    cells = []
    for motif in cfg.motifs:
        probs = [(i, g, SuccessProbability(count_motifs(g, motif), (2 * g.edge_count) ** motif.edge_count))
                 for i, g in kept]
        truths = [sp.numerator for _, _, sp in probs]
        for eps, delta in cfg.accuracies:
            for method in cfg.methods:
                est_cfg = EstimatorConfig(eps, delta, method, cfg.ae_scale, 0, cfg.ae_mode)
                estimates = []
                for i, g, sp in probs:
                    rng = make_rng(derive_seed(cfg.master_seed, "estimate", n, p_e, i,
                                               str(motif), method, eps, delta))
                    p_hat, _ = estimate_probability(sp.value, est_cfg, rng)
                    estimates.append(scale_to_count(p_hat, sp))
                try:
                    nrmse = normalized_rmse(estimates, truths) if truths else math.nan
                except UndefinedCellError:
                    nrmse = math.nan
                cells.append(CellResult(
                    n, p_e, str(motif), method, eps, delta, len(truths),
                    float(np.mean(truths)) if truths else 0.0, nrmse, skipped,
                    est_cfg.budget, truths, estimates,
                    [i for i, _, _ in probs], [g.edge_count for _, g, _ in probs],
                ))
    return cells


def run_sweep(cfg: SweepConfig) -> SweepReport:
    """Run every cell of ``cfg``.

    Instances without edges are skipped and counted in ``skipped``. Cells
    whose mean true count is zero (or that have no usable instance) get a
    NaN normalized RMSE instead of failing the sweep.
    """
    units = [(n, p) for n in cfg.n_values for p in cfg.edge_probs]
    if cfg.workers == 1:
        results = [_run_unit(cfg, n, p) for n, p in units]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_unit, [cfg] * len(units), *zip(*units)))
    report = SweepReport([c for cells in results for c in cells])
    report.cells = report.sorted_cells()
    return report


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else format(x, ".17g")


def emit_csv(report: SweepReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in report.sorted_cells():
            w.writerow([c.n, _fmt(c.p_e), c.motif, c.method, _fmt(c.eps), _fmt(c.delta),
                        c.instances, _fmt(c.mean_true_count), _fmt(c.normalized_rmse), c.skipped])


def emit_raw(report: SweepReport, path) -> None:
    """Per-instance dump (true count and estimate) for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_HEADER)
        for c in report.sorted_cells():
            for i, e, x, xh in zip(c.instance_ids, c.edge_counts, c.truths, c.estimates):
                w.writerow([c.n, _fmt(c.p_e), c.motif, c.method, _fmt(c.eps), _fmt(c.delta),
                            i, e, x, _fmt(xh), c.shots_or_queries])
