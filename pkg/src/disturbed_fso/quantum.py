"""Two-qubit state model, heralded-coincidence likelihood and entanglement measures.

Measurement bases are labeled ``"I"`` (rectilinear, Pauli Z), ``"X"``
(diagonal) and ``"Y"`` (circular). Outcome 0 is the +1 eigenstate. The
sender measures the herald photon, the receiver measures the transmitted
photon, which survives the channel with probability ``alpha``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Mapping, NamedTuple

import numpy as np

__all__ = [
    "BASES",
    "BASIS_PAIRS",
    "PARAM_NAMES",
    "PARAM_LOWER",
    "PARAM_UPPER",
    "DensityMatrixParams",
    "BasisCounts",
    "MeasurementDataset",
    "cholesky_lower",
    "cholesky_factor",
    "check_density_matrix",
    "born_probabilities",
    "all_born_probabilities",
    "single_basis_likelihood",
    "alpha_log_likelihood",
    "state_log_likelihood",
    "full_likelihood",
    "concurrence",
    "binary_entropy",
    "entanglement_of_formation",
    "fidelity",
    "bme_estimate",
    "singlet",
    "singlet_vector",
    "werner",
]

BASES = ("I", "X", "Y")
BASIS_PAIRS = tuple(itertools.product(BASES, BASES))

PARAM_NAMES = (
    "u1", "u2", "u3",
    "theta21", "theta31", "theta32", "theta41", "theta42", "theta43",
    "phi21", "phi31", "phi32", "phi41", "phi42", "phi43",
)  # fmt: skip
PARAM_LOWER = np.zeros(15)
PARAM_UPPER = np.array([math.pi / 2] * 9 + [2 * math.pi] * 6)

_SY = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(_SY, _SY)

# single-qubit eigenvectors, outcome 0 first
_EIGVECS = {
    "I": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "X": (np.array([1, 1], dtype=complex) / math.sqrt(2), np.array([1, -1], dtype=complex) / math.sqrt(2)),
    "Y": (np.array([1, 1j]) / math.sqrt(2), np.array([1, -1j]) / math.sqrt(2)),
}


def _projector_table() -> np.ndarray:
    # (9 basis pairs, 4 outcomes 00/01/10/11, 4, 4)
    table = np.empty((len(BASIS_PAIRS), 4, 4, 4), dtype=complex)
    for b, (k, l) in enumerate(BASIS_PAIRS):
        for o, (i, j) in enumerate(itertools.product((0, 1), (0, 1))):
            v = np.kron(_EIGVECS[k][i], _EIGVECS[l][j])
            table[b, o] = np.outer(v, v.conj())
    return table


_PROJECTORS = _projector_table()
# Tr(rho P) = sum_ij rho_ij P_ji; pre-transpose so the contraction is a dot product
_PROJ_FLAT = _PROJECTORS.transpose(0, 1, 3, 2).reshape(len(BASIS_PAIRS) * 4, 16)


@dataclass(frozen=True)
class DensityMatrixParams:
    """The 15 angles of the Cholesky parameterization of a two-qubit state."""

    u1: float = 0.0
    u2: float = 0.0
    u3: float = 0.0
    theta21: float = 0.0
    theta31: float = 0.0
    theta32: float = 0.0
    theta41: float = 0.0
    theta42: float = 0.0
    theta43: float = 0.0
    phi21: float = 0.0
    phi31: float = 0.0
    phi32: float = 0.0
    phi41: float = 0.0
    phi42: float = 0.0
    phi43: float = 0.0

    def __post_init__(self):
        for f, lo, hi in zip(fields(self), PARAM_LOWER, PARAM_UPPER):
            v = getattr(self, f.name)
            if not lo <= v <= hi:
                raise ValueError(f"{f.name}={v} outside [{lo}, {hi:.6g}]")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in PARAM_NAMES])

    @classmethod
    def from_array(cls, values) -> "DensityMatrixParams":
        values = np.asarray(values, dtype=float)
        if values.shape != (15,):
            raise ValueError(f"expected 15 parameters, got shape {values.shape}")
        return cls(*values.tolist())

    @classmethod
    def random(cls, rng: np.random.Generator) -> "DensityMatrixParams":
        return cls.from_array(rng.uniform(PARAM_LOWER, PARAM_UPPER))


def _as_tau(tau) -> np.ndarray:
    if isinstance(tau, DensityMatrixParams):
        return tau.as_array()
    t = np.asarray(tau, dtype=float)
    if t.shape != (15,):
        raise ValueError(f"expected 15 parameters, got shape {t.shape}")
    if np.any(t < PARAM_LOWER) or np.any(t > PARAM_UPPER):
        raise ValueError("parameters outside their ranges")
    return t


def cholesky_lower(tau) -> np.ndarray:
    """Lower-triangular factor ``L(tau)`` with ``rho = L L^dagger``."""
    return _lower(_as_tau(tau))


def _lower(t) -> np.ndarray:
    # no range checks; the sampler calls this in its inner loop
    u1, u2, u3, t21, t31, t32, t41, t42, t43, p21, p31, p32, p41, p42, p43 = t
    s1, s2, s3 = math.sin(u1), math.sin(u2), math.sin(u3)
    c1, c2, c3 = math.cos(u1), math.cos(u2), math.cos(u3)
    row2 = s1 * c2
    row3 = s1 * s2 * c3
    row4 = s1 * s2 * s3
    e = np.exp(1j * np.array([p21, p31, p32, p41, p42, p43]))

    L = np.zeros((4, 4), dtype=complex)
    L[0, 0] = c1
    L[1, 0] = row2 * math.cos(t21) * e[0]
    L[1, 1] = row2 * math.sin(t21)
    L[2, 0] = row3 * math.cos(t31) * e[1]
    L[2, 1] = row3 * math.sin(t31) * math.cos(t32) * e[2]
    L[2, 2] = row3 * math.sin(t31) * math.sin(t32)
    L[3, 0] = row4 * math.cos(t41) * e[3]
    L[3, 1] = row4 * math.sin(t41) * math.cos(t42) * e[4]
    L[3, 2] = row4 * math.sin(t41) * math.sin(t42) * math.cos(t43) * e[5]
    L[3, 3] = row4 * math.sin(t41) * math.sin(t42) * math.sin(t43)
    return L


def cholesky_factor(tau) -> np.ndarray:
    """Density matrix ``L(tau) L(tau)^dagger``; unit trace, Hermitian and PSD by construction."""
    L = cholesky_lower(tau)
    return L @ L.conj().T


def check_density_matrix(rho, atol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless ``rho`` is a unit-trace Hermitian PSD 4x4 matrix."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {rho.shape}")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError(f"trace {np.trace(rho)} != 1")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("matrix is not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise ValueError("matrix is not positive semi-definite")


def born_probabilities(rho, basis_pair) -> np.ndarray:
    """``[p00, p01, p10, p11]`` for the sender/receiver basis pair, e.g. ``("I", "X")``."""
    b = BASIS_PAIRS.index(tuple(basis_pair))
    p = np.einsum("oij,ji->o", _PROJECTORS[b], np.asarray(rho)).real
    return np.clip(p, 0.0, None)


def all_born_probabilities(rho) -> np.ndarray:
    """Outcome probabilities for every basis pair, shape ``(9, 4)``."""
    p = (_PROJ_FLAT @ np.asarray(rho).reshape(16)).real.reshape(len(BASIS_PAIRS), 4)
    return np.clip(p, 0.0, None)


class BasisCounts(NamedTuple):
    """Herald singles ``A0, A1`` and coincidences ``c00..c11`` for one basis pair."""

    a0: int = 0
    a1: int = 0
    c00: int = 0
    c01: int = 0
    c10: int = 0
    c11: int = 0

    def validate(self) -> "BasisCounts":
        if min(self) < 0:
            raise ValueError(f"negative count in {self}")
        if self.c00 + self.c01 > self.a0 or self.c10 + self.c11 > self.a1:
            raise ValueError(f"coincidences exceed herald counts in {self}")
        return self

    @property
    def heralds(self) -> int:
        return self.a0 + self.a1

    @property
    def coincidences(self) -> int:
        return self.c00 + self.c01 + self.c10 + self.c11


class MeasurementDataset:
    """Counts for the nine basis pairs, stored as an integer array of shape ``(9, 6)``."""

    def __init__(self, counts: Mapping[tuple[str, str], Iterable[int]] | None = None):
        self.counts = np.zeros((len(BASIS_PAIRS), 6), dtype=np.int64)
        for pair, c in (counts or {}).items():
            self[pair] = c

    def __getitem__(self, pair) -> BasisCounts:
        return BasisCounts(*map(int, self.counts[BASIS_PAIRS.index(tuple(pair))]))

    def __setitem__(self, pair, counts) -> None:
        c = BasisCounts(*(int(v) for v in counts)).validate()
        self.counts[BASIS_PAIRS.index(tuple(pair))] = c

    def __eq__(self, other):
        return isinstance(other, MeasurementDataset) and np.array_equal(self.counts, other.counts)

    def __repr__(self):
        return f"MeasurementDataset(heralds={self.total_heralds}, coincidences={self.total_coincidences})"

    def items(self):
        for pair in BASIS_PAIRS:
            yield pair, self[pair]

    def to_dict(self) -> dict[str, list[int]]:
        return {k + l: list(c) for (k, l), c in self.items()}

    @classmethod
    def from_dict(cls, data: Mapping[str, Iterable[int]]) -> "MeasurementDataset":
        return cls({(key[0], key[1]): value for key, value in data.items()})

    @property
    def total_heralds(self) -> int:
        return int(self.counts[:, :2].sum())

    @property
    def total_coincidences(self) -> int:
        return int(self.counts[:, 2:].sum())


def _xlogy(n, p):
    # n log p with 0 log 0 = 0; n > 0 with p = 0 gives -inf
    n = np.asarray(n, dtype=float)
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = n * np.log(p)
    return np.where(n == 0, 0.0, out)


def alpha_log_likelihood(n_heralds: int, n_coincidences: int, alpha: float) -> float:
    """``C log(alpha) + (N - C) log(1 - alpha)``: the loss part of the likelihood."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return float(_xlogy(n_coincidences, alpha) + _xlogy(n_heralds - n_coincidences, 1.0 - alpha))


def _state_terms(counts: np.ndarray, p: np.ndarray) -> np.ndarray:
    # counts (..., 6), p (..., 4) -> per-basis log-likelihood of outcomes given alpha
    a0, a1 = counts[..., 0], counts[..., 1]
    c = counts[..., 2:]
    lost0 = a0 - c[..., 0] - c[..., 1]
    lost1 = a1 - c[..., 2] - c[..., 3]
    return (
        _xlogy(c, p).sum(axis=-1)
        + _xlogy(lost0, p[..., 0] + p[..., 1])
        + _xlogy(lost1, p[..., 2] + p[..., 3])
    )


def single_basis_likelihood(counts, p, alpha: float) -> float:
    """Log-probability of one basis pair's herald/coincidence record.

    ``counts`` is ``(A0, A1, c00, c01, c10, c11)`` and ``p`` the four joint
    outcome probabilities. This is the probability of one particular ordered
    sequence of outcomes, so no multinomial coefficient appears.
    """
    c = BasisCounts(*(int(v) for v in counts)).validate()
    p = np.asarray(p, dtype=float)
    if p.shape != (4,) or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
        raise ValueError(f"p must be 4 non-negative probabilities summing to 1, got {p}")
    return alpha_log_likelihood(c.heralds, c.coincidences, alpha) + float(
        _state_terms(np.array(c), p)
    )


def state_log_likelihood(data: MeasurementDataset, rho) -> float:
    """Outcome part of the full log-likelihood (independent of ``alpha``)."""
    return float(_state_terms(data.counts, all_born_probabilities(rho)).sum())


def full_likelihood(data: MeasurementDataset, tau, alpha: float) -> float:
    """Sum of the nine single-basis log-likelihoods for state ``rho(tau)``."""
    return alpha_log_likelihood(
        data.total_heralds, data.total_coincidences, alpha
    ) + state_log_likelihood(data, cholesky_factor(tau))


def concurrence(rho) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of ``rho rho_tilde``,
    obtained here as singular values of ``V^T (Y x Y) V`` with ``rho = V V^dagger``.
    That route keeps full precision for rank-deficient states, where taking
    square roots of eigenvalues near zero would not.
    """
    rho = np.asarray(rho, dtype=complex)
    w, U = np.linalg.eigh(rho)
    w = np.where(w > 1e-14 * max(w.max(), 0.0), w, 0.0)
    V = U * np.sqrt(w)
    lam = np.linalg.svd(V.T @ _YY @ V, compute_uv=False)
    return float(min(max(0.0, lam[0] - lam[1:].sum()), 1.0))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    return float(-_xlogy(x, x) / math.log(2) - _xlogy(1 - x, 1 - x) / math.log(2))


def entanglement_of_formation(rho=None, *, c: float | None = None) -> float:
    """Entanglement of formation, from a density matrix or directly from its concurrence."""
    if c is None:
        c = concurrence(rho)
    c = min(max(float(c), 0.0), 1.0)
    return min(max(binary_entropy((1.0 + math.sqrt(1.0 - c * c)) / 2.0), 0.0), 1.0)


def fidelity(rho, psi) -> float:
    """``<psi| rho |psi>`` for a pure reference state."""
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ np.asarray(rho) @ psi))


def singlet_vector() -> np.ndarray:
    """``(|HV> - |VH>) / sqrt(2)`` in the ``HH, HV, VH, VV`` ordering."""
    return np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)


def singlet() -> np.ndarray:
    psi = singlet_vector()
    return np.outer(psi, psi.conj())


def werner(p: float) -> np.ndarray:
    return p * singlet() + (1 - p) * np.eye(4) / 4


def bme_estimate(samples: Iterable, functional: Callable) -> tuple:
    """Sample mean and standard deviation of ``functional(tau, alpha)``.

    ``samples`` yields objects with ``tau`` and ``alpha`` attributes. Array
    valued functionals are averaged element-wise, so
    ``bme_estimate(samples, lambda t, a: cholesky_factor(t))`` gives the
    posterior-mean density matrix.
    """
    values = [np.asarray(functional(s.tau, s.alpha)) for s in samples]
    if not values:
        raise ValueError("no samples")
    stack = np.stack(values)
    mean = stack.mean(axis=0)
    std = stack.std(axis=0, ddof=1) if len(values) > 1 else np.zeros_like(mean, dtype=float)
    if mean.ndim == 0:
        return float(mean.real) if not np.iscomplexobj(mean) else complex(mean), float(std)
    return mean, std
