"""Posterior sampling of (tau, alpha) by univariate slice sampling.

Several chains with independent random streams sweep all 16 coordinates in
turn (stepping out, then shrinkage; Neal, Ann. Statist. 31, 2003). The prior
is uniform over the parameter box. Chains are checked against each other in
rounds: once every pair agrees on the running means of EOF and alpha to
within the pooled posterior standard deviation (times a tolerance), the
pooled samples are accepted.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .quantum import (
    PARAM_LOWER,
    PARAM_UPPER,
    DensityMatrixParams,
    MeasurementDataset,
    _lower,
    _PROJ_FLAT,
    concurrence,
    entanglement_of_formation,
    fidelity,
    singlet_vector,
)

__all__ = [
    "SamplerConfig",
    "PosteriorSample",
    "ChainTrace",
    "EntanglementEstimate",
    "PosteriorResult",
    "LogPosterior",
    "slice_sample_posterior",
    "chains_overlap",
]

LOWER = np.append(PARAM_LOWER, 0.0)
UPPER = np.append(PARAM_UPPER, 1.0)
ALPHA = 15  # index of alpha in the 16-vector


@dataclass(frozen=True)
class SamplerConfig:
    n_chains: int = 4
    burn_in: int = 300
    n_samples: int = 1000  # retained sweeps per chain before convergence is accepted
    check_every: int = 250
    max_sweeps: int = 20000
    overlap_tolerance: float = 1.0
    width_fraction: float = 0.1
    seed: int = 0
    n_workers: int = 1

    def __post_init__(self):
        if self.n_chains < 2:
            raise ValueError("need at least two chains to judge convergence")
        if min(self.n_samples, self.check_every, self.max_sweeps) < 1 or self.burn_in < 0:
            raise ValueError("sweep counts must be positive")
        if not 0 < self.width_fraction <= 1:
            raise ValueError("width_fraction must be in (0, 1]")


@dataclass(frozen=True)
class PosteriorSample:
    tau: np.ndarray
    alpha: float

    @property
    def params(self) -> DensityMatrixParams:
        return DensityMatrixParams.from_array(self.tau)


class LogPosterior:
    """Unnormalized log posterior over the 16-vector ``(tau..., alpha)``.

    Split into an alpha part and a state part so a coordinate move only
    recomputes the part it touches.
    """

    def __init__(self, data: MeasurementDataset | np.ndarray):
        counts = data.counts if isinstance(data, MeasurementDataset) else np.asarray(data)
        counts = counts.astype(float)
        self.n_heralds = counts[:, :2].sum()
        self.n_coinc = counts[:, 2:].sum()
        lost0 = counts[:, 0] - counts[:, 2] - counts[:, 3]
        lost1 = counts[:, 1] - counts[:, 4] - counts[:, 5]
        self._c = counts[:, 2:].ravel()
        self._lost = np.concatenate([lost0, lost1])
        self._c_nz = self._c > 0
        self._lost_nz = self._lost > 0

    def alpha_part(self, alpha: float) -> float:
        if not 0.0 <= alpha <= 1.0:
            return -math.inf
        out = 0.0
        if self.n_coinc > 0:
            out += self.n_coinc * math.log(alpha) if alpha > 0 else -math.inf
        rest = self.n_heralds - self.n_coinc
        if rest > 0:
            out += rest * math.log1p(-alpha) if alpha < 1 else -math.inf
        return out

    def state_part(self, tau: np.ndarray) -> float:
        L = _lower(tau)
        rho = L @ L.conj().T
        p = np.maximum((_PROJ_FLAT @ rho.ravel()).real, 0.0)
        p2 = p.reshape(-1, 4)
        q = np.concatenate([p2[:, 0] + p2[:, 1], p2[:, 2] + p2[:, 3]])
        with np.errstate(divide="ignore"):
            out = np.dot(self._c[self._c_nz], np.log(p[self._c_nz]))
            out += np.dot(self._lost[self._lost_nz], np.log(q[self._lost_nz]))
        return float(out)

    def __call__(self, x: np.ndarray) -> float:
        if np.any(x < LOWER) or np.any(x > UPPER):
            return -math.inf
        return self.alpha_part(x[ALPHA]) + self.state_part(x[:ALPHA])


@dataclass
class _ChainState:
    x: np.ndarray
    state_lp: float
    alpha_lp: float
    rng: np.random.Generator
    sweeps: int = 0
    evaluations: int = 0


def _slice_coordinate(state: _ChainState, d: int, width: float, target: LogPosterior) -> None:
    x, rng = state.x, state.rng
    lo, hi = LOWER[d], UPPER[d]
    if d == ALPHA:
        fixed = state.state_lp

        def f(v):
            return fixed + target.alpha_part(v)
    else:
        fixed = state.alpha_lp
        trial = x[:ALPHA].copy()

        def f(v):
            trial[d] = v
            return fixed + target.state_part(trial)

    current = state.state_lp + state.alpha_lp
    log_y = current - rng.exponential()
    x0 = x[d]
    left = x0 - rng.uniform() * width
    right = left + width
    n_eval = 0
    while left > lo and f(left) > log_y:
        left -= width
        n_eval += 1
    while right < hi and f(right) > log_y:
        right += width
        n_eval += 1
    left, right = max(left, lo), min(right, hi)
    while True:
        v = rng.uniform(left, right)
        lp = f(v)
        n_eval += 1
        if lp > log_y:
            break
        if v < x0:
            left = v
        else:
            right = v
        if right - left < 1e-15 * (hi - lo):
            # slice collapsed onto the current point
            v, lp = x0, current
            break
    x[d] = v
    if d == ALPHA:
        state.alpha_lp = lp - state.state_lp
    else:
        state.state_lp = lp - state.alpha_lp
    state.evaluations += n_eval


def _sweep(state: _ChainState, widths: np.ndarray, target: LogPosterior) -> None:
    for d in range(LOWER.size):
        _slice_coordinate(state, d, widths[d], target)
    state.sweeps += 1


def _run_chain(state: _ChainState, counts: np.ndarray, widths, n_sweeps: int, keep: bool, reference):
    """Advance one chain; returns the updated state and, if ``keep``, its draws.

    Module level so it can be shipped to worker processes.
    """
    target = LogPosterior(counts)
    draws = np.empty((n_sweeps if keep else 0, LOWER.size))
    eof = np.empty(len(draws))
    fid = np.empty(len(draws))
    for i in range(n_sweeps):
        _sweep(state, widths, target)
        if keep:
            draws[i] = state.x
            L = _lower(state.x[:ALPHA])
            rho = L @ L.conj().T
            eof[i] = entanglement_of_formation(c=concurrence(rho))
            fid[i] = fidelity(rho, reference)
    return state, draws, eof, fid


@dataclass
class ChainTrace:
    tau: np.ndarray  # (n, 15)
    alpha: np.ndarray
    eof: np.ndarray
    fidelity: np.ndarray
    sweeps: int = 0
    evaluations: int = 0

    def extend(self, draws, eof, fid):
        self.tau = np.concatenate([self.tau, draws[:, :ALPHA]])
        self.alpha = np.concatenate([self.alpha, draws[:, ALPHA]])
        self.eof = np.concatenate([self.eof, eof])
        self.fidelity = np.concatenate([self.fidelity, fid])

    def __len__(self):
        return self.alpha.size


def chains_overlap(means: np.ndarray, stds: np.ndarray, tolerance: float = 1.0) -> bool:
    """True if every pair of chain means differs by at most ``tolerance`` pooled std."""
    means, stds = np.asarray(means), np.asarray(stds)
    for i in range(means.size):
        for j in range(i + 1, means.size):
            pooled = math.sqrt(0.5 * (stds[i] ** 2 + stds[j] ** 2))
            if abs(means[i] - means[j]) > tolerance * pooled:
                return False
    return True


@dataclass(frozen=True)
class EntanglementEstimate:
    mean_rho: np.ndarray
    eof_mean: float
    eof_std: float
    alpha_mean: float
    alpha_std: float
    fidelity_mean: float
    n_samples: int
    converged: bool


@dataclass
class PosteriorResult:
    """Pooled posterior draws plus per-chain diagnostics.

    ``converged`` is False when ``max_sweeps`` ran out before the chains
    agreed; the draws are still returned so the failure can be inspected.
    """

    chains: list[ChainTrace]
    converged: bool
    config: SamplerConfig
    diagnostics: dict = field(default_factory=dict)

    def samples(self) -> Iterator[PosteriorSample]:
        for chain in self.chains:
            for t, a in zip(chain.tau, chain.alpha):
                yield PosteriorSample(t, float(a))

    @property
    def n_samples(self) -> int:
        return sum(len(c) for c in self.chains)

    def pooled(self, name: str) -> np.ndarray:
        return np.concatenate([getattr(c, name) for c in self.chains])

    def estimate(self) -> EntanglementEstimate:
        rho = np.zeros((4, 4), dtype=complex)
        for chain in self.chains:
            for t in chain.tau:
                L = _lower(t)
                rho += L @ L.conj().T
        rho /= self.n_samples
        eof, alpha = self.pooled("eof"), self.pooled("alpha")
        return EntanglementEstimate(
            mean_rho=rho,
            eof_mean=float(eof.mean()),
            eof_std=float(eof.std(ddof=1)),
            alpha_mean=float(alpha.mean()),
            alpha_std=float(alpha.std(ddof=1)),
            fidelity_mean=float(self.pooled("fidelity").mean()),
            n_samples=self.n_samples,
            converged=self.converged,
        )

    def summary(self) -> dict:
        est = self.estimate()
        return {
            "alpha_mean": est.alpha_mean,
            "alpha_std": est.alpha_std,
            "eof_mean": est.eof_mean,
            "eof_std": est.eof_std,
            "n_samples": est.n_samples,
            "converged": est.converged,
        }

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["chain", "sample_index", "alpha", "eof", "fidelity"])
            for k, chain in enumerate(self.chains):
                for i in range(len(chain)):
                    writer.writerow(
                        [k, i, repr(float(chain.alpha[i])), repr(float(chain.eof[i])),
                         repr(float(chain.fidelity[i]))]
                    )  # fmt: skip

    def write_summary(self, path) -> None:
        Path(path).write_text(json.dumps(self.summary(), indent=2) + "\n")


def _initial_states(config: SamplerConfig, target: LogPosterior) -> list[_ChainState]:
    streams = np.random.SeedSequence(config.seed).spawn(config.n_chains)
    states = []
    for ss in streams:
        rng = np.random.Generator(np.random.PCG64(ss))
        # overdispersed start, but away from alpha = 0 or 1 where the likelihood may vanish
        for _ in range(1000):
            x = rng.uniform(LOWER, UPPER)
            s_lp, a_lp = target.state_part(x[:ALPHA]), target.alpha_part(x[ALPHA])
            if math.isfinite(s_lp + a_lp):
                break
        else:
            raise RuntimeError("could not find a starting point with finite posterior density")
        states.append(_ChainState(x, s_lp, a_lp, rng))
    return states


def slice_sample_posterior(
    data: MeasurementDataset, config: SamplerConfig | None = None, reference=None
) -> PosteriorResult:
    """Sample ``P(tau, alpha | data)`` with independent slice-sampling chains.

    ``reference`` is the pure state used for the per-draw fidelity column
    (the singlet by default).
    """
    config = config or SamplerConfig()
    reference = singlet_vector() if reference is None else np.asarray(reference, dtype=complex)
    target = LogPosterior(data)
    counts = data.counts
    widths = config.width_fraction * (UPPER - LOWER)
    states = _initial_states(config, target)
    chains = [ChainTrace(np.empty((0, 15)), np.empty(0), np.empty(0), np.empty(0)) for _ in states]

    executor = ProcessPoolExecutor(config.n_workers) if config.n_workers > 1 else None

    def advance(n_sweeps, keep):
        nonlocal states
        args = [(s, counts, widths, n_sweeps, keep, reference) for s in states]
        if executor is None:
            results = [_run_chain(*a) for a in args]
        else:
            results = list(executor.map(_run_chain, *zip(*args)))
        states = [r[0] for r in results]
        if keep:
            for chain, (_, draws, eof, fid) in zip(chains, results):
                chain.extend(draws, eof, fid)

    history = []
    converged = False
    try:
        if config.burn_in:
            advance(config.burn_in, keep=False)
        while True:
            advance(config.check_every, keep=True)
            n_kept = len(chains[0])
            stats = {
                name: (
                    np.array([getattr(c, name).mean() for c in chains]),
                    np.array([getattr(c, name).std(ddof=1) for c in chains]),
                )
                for name in ("eof", "alpha")
            }
            agree = all(
                chains_overlap(m, s, config.overlap_tolerance) for m, s in stats.values()
            )
            history.append(
                {
                    "retained_per_chain": n_kept,
                    "agree": agree,
                    **{f"{k}_means": v[0].tolist() for k, v in stats.items()},
                }
            )
            if agree and n_kept >= config.n_samples:
                converged = True
                break
            if states[0].sweeps >= config.max_sweeps:
                break
    finally:
        if executor is not None:
            executor.shutdown()

    for chain, state in zip(chains, states):
        chain.sweeps, chain.evaluations = state.sweeps, state.evaluations
    diagnostics = {
        "history": history,
        "per_chain": [
            {
                "sweeps": c.sweeps,
                "evaluations": c.evaluations,
                "eof_mean": float(c.eof.mean()),
                "eof_std": float(c.eof.std(ddof=1)),
                "alpha_mean": float(c.alpha.mean()),
                "alpha_std": float(c.alpha.std(ddof=1)),
            }
            for c in chains
        ],
        "config": asdict(config),
    }
    return PosteriorResult(chains, converged, config, diagnostics)
