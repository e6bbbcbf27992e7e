"""Simulated heralded entanglement distribution over a lossy channel."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .quantum import BASIS_PAIRS, MeasurementDataset, all_born_probabilities, check_density_matrix, singlet
from .sampler import SamplerConfig, slice_sample_posterior

__all__ = [
    "ExperimentConfig",
    "SweepRow",
    "transmission_from_db",
    "outcome_probabilities",
    "simulate_dataset",
    "sweep_attenuation",
    "write_sweep_csv",
]


def transmission_from_db(attenuation_db: float) -> float:
    """Channel transmission ``10^(-A/10)``; infinite loss gives exactly 0."""
    if attenuation_db < 0:
        raise ValueError("attenuation must be >= 0 dB")
    if math.isinf(attenuation_db):
        return 0.0
    return 10.0 ** (-attenuation_db / 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    attenuation_db: float = 0.0
    pairs_per_basis: int = 10**6
    seed: int = 0
    true_state: np.ndarray = field(default_factory=singlet, compare=False)

    def __post_init__(self):
        if self.pairs_per_basis < 1:
            raise ValueError("pairs_per_basis must be >= 1")
        if not self.attenuation_db >= 0:
            raise ValueError("attenuation_db must be >= 0")
        check_density_matrix(self.true_state)

    @property
    def alpha(self) -> float:
        return transmission_from_db(self.attenuation_db)


def outcome_probabilities(p: np.ndarray, alpha: float) -> np.ndarray:
    """Per-pair probabilities of the six leaves of the herald/loss tree.

    Order: sender 0 and photon lost, sender 1 and photon lost, then
    coincidences 00, 01, 10, 11.
    """
    p = np.asarray(p, dtype=float)
    lost = (1.0 - alpha) * np.array([p[0] + p[1], p[2] + p[3]])
    probs = np.concatenate([lost, alpha * p])
    return probs / probs.sum()


def simulate_dataset(config: ExperimentConfig) -> MeasurementDataset:
    """Draw herald and coincidence counts for all nine basis pairs.

    Each basis pair gets ``pairs_per_basis`` pairs, drawn as one multinomial
    over the six outcome leaves from its own PCG64 stream seeded by
    ``(seed, basis index)``.
    """
    alpha = config.alpha
    probs = all_born_probabilities(config.true_state)
    data = MeasurementDataset()
    for b, pair in enumerate(BASIS_PAIRS):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([config.seed, b])))
        lost0, lost1, c00, c01, c10, c11 = rng.multinomial(
            config.pairs_per_basis, outcome_probabilities(probs[b], alpha)
        )
        data[pair] = (lost0 + c00 + c01, lost1 + c10 + c11, c00, c01, c10, c11)
    return data


@dataclass(frozen=True)
class SweepRow:
    attenuation_db: float
    alpha_mean: float
    alpha_std: float
    eof_mean: float
    eof_std: float
    converged: bool


def sweep_attenuation(
    configs: Sequence[ExperimentConfig], sampler: SamplerConfig | None = None
) -> list[SweepRow]:
    """Simulate, sample and summarize each configuration independently.

    Rows whose chains did not agree are kept with ``converged=False``.
    """
    sampler = sampler or SamplerConfig()
    rows = []
    for config in configs:
        data = simulate_dataset(config)
        result = slice_sample_posterior(data, replace(sampler, seed=sampler.seed + config.seed))
        est = result.estimate()
        rows.append(
            SweepRow(
                attenuation_db=config.attenuation_db,
                alpha_mean=est.alpha_mean,
                alpha_std=est.alpha_std,
                eof_mean=est.eof_mean,
                eof_std=est.eof_std,
                converged=est.converged,
            )
        )
    return rows


SWEEP_COLUMNS = ["attenuation_db", "alpha_mean", "alpha_std", "eof_mean", "eof_std", "converged"]


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for r in rows:
            writer.writerow([repr(getattr(r, c)) if c != "converged" else str(r.converged).lower()
                             for c in SWEEP_COLUMNS])  # fmt: skip


def read_sweep_csv(path) -> list[SweepRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            SweepRow(
                **{c: float(row[c]) for c in SWEEP_COLUMNS[:-1]},
                converged=row["converged"] == "true",
            )
            for row in reader
        ]
