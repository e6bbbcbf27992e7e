"""Mie extinction, scattering and absorption efficiencies of homogeneous spheres.

Coefficients a_n, b_n are built from Riccati-Bessel functions of the real
size parameter (upward recurrence) and the logarithmic derivative D_n(mx)
(downward recurrence), following Bohren & Huffman, "Absorption and
Scattering of Light by Small Particles" (1983), with Wiscombe's series
truncation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ComplexRefractiveIndex",
    "MieEfficiencies",
    "MieResolutionError",
    "size_parameter",
    "wiscombe_nmax",
    "mie_coefficients",
    "mie_efficiencies",
    "extinction_efficiency",
]

# Beyond this the upward Riccati-Bessel recurrence and the O(x) series
# lengths stop being worth trusting in double precision.
MAX_SIZE_PARAMETER = 2.0e5


class MieResolutionError(ArithmeticError):
    """Raised when the size parameter is outside the range the series resolves."""


@dataclass(frozen=True)
class ComplexRefractiveIndex:
    """Complex refractive index ``m = real_part + 1j * imag_part`` relative to the medium."""

    real_part: float
    imag_part: float = 0.0

    def __post_init__(self):
        if not self.real_part > 0:
            raise ValueError(f"real_part must be > 0, got {self.real_part}")
        if not self.imag_part >= 0:
            raise ValueError(f"imag_part must be >= 0, got {self.imag_part}")

    @property
    def value(self) -> complex:
        return complex(self.real_part, self.imag_part)

    @classmethod
    def coerce(cls, m) -> "ComplexRefractiveIndex":
        if isinstance(m, cls):
            return m
        if isinstance(m, (tuple, list)):
            return cls(float(m[0]), float(m[1]))
        m = complex(m)
        return cls(m.real, m.imag)


@dataclass(frozen=True)
class MieEfficiencies:
    q_ext: float
    q_sca: float
    q_abs: float


def size_parameter(diameter: float, wavelength: float) -> float:
    """Return ``pi * diameter / wavelength``."""
    if not diameter > 0:
        raise ValueError(f"diameter must be > 0, got {diameter}")
    if not wavelength > 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength}")
    return math.pi * diameter / wavelength


def wiscombe_nmax(x: float) -> int:
    """Series length ``ceil(x + 4 x^(1/3) + 2)``."""
    return int(math.ceil(x + 4.0 * x ** (1.0 / 3.0) + 2.0))


def _log_derivative(mx: complex, nmax: int) -> np.ndarray:
    # D_n(mx) for n = 0..nmax by downward recurrence. The starting index must
    # sit above |mx| as well as nmax, otherwise the recurrence has not yet
    # forgotten the arbitrary D = 0 seed when it reaches the orders we keep.
    nstart = max(nmax, int(abs(mx))) + 15
    d = np.zeros(nstart + 1, dtype=complex)
    for n in range(nstart, 0, -1):
        d[n - 1] = n / mx - 1.0 / (d[n] + n / mx)
    return d[: nmax + 1]


def mie_coefficients(m, x: float, nmax: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """External Mie coefficients ``a_n, b_n`` for ``n = 1..nmax``.

    Parameters
    ----------
    m : complex or ComplexRefractiveIndex
        Relative refractive index of the sphere.
    x : float
        Size parameter ``pi d / lambda``.
    nmax : int, optional
        Number of terms. Defaults to Wiscombe's criterion.

    Raises
    ------
    MieResolutionError
        If ``x`` is beyond the resolvable range or a recurrence produced a
        non-finite value.
    """
    m = ComplexRefractiveIndex.coerce(m).value
    if not x > 0:
        raise ValueError(f"size parameter must be > 0, got {x}")
    if not math.isfinite(x) or x > MAX_SIZE_PARAMETER:
        raise MieResolutionError(
            f"size parameter {x:g} exceeds the resolvable limit {MAX_SIZE_PARAMETER:g}"
        )
    if nmax is None:
        nmax = wiscombe_nmax(x)

    d = _log_derivative(m * x, nmax)

    # Riccati-Bessel psi_n(x) = x j_n(x) and chi_n(x) = -x y_n(x), n = -1..nmax
    psi = np.empty(nmax + 2)
    chi = np.empty(nmax + 2)
    psi[0], psi[1] = math.cos(x), math.sin(x)
    chi[0], chi[1] = -math.sin(x), math.cos(x)
    for n in range(1, nmax + 1):
        psi[n + 1] = (2 * n - 1) / x * psi[n] - psi[n - 1]
        chi[n + 1] = (2 * n - 1) / x * chi[n] - chi[n - 1]
    # index k in these arrays holds order k - 1
    xi = psi - 1j * chi

    n = np.arange(1, nmax + 1)
    dn = d[1:]
    psi_n, psi_nm1 = psi[2:], psi[1:-1]
    xi_n, xi_nm1 = xi[2:], xi[1:-1]

    ta = dn / m + n / x
    tb = m * dn + n / x
    with np.errstate(all="ignore"):
        a = (ta * psi_n - psi_nm1) / (ta * xi_n - xi_nm1)
        b = (tb * psi_n - psi_nm1) / (tb * xi_n - xi_nm1)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise MieResolutionError(
            f"Mie recurrences overflowed for m={m}, x={x:g} (nmax={nmax})"
        )
    return a, b


def mie_efficiencies(m, x: float) -> MieEfficiencies:
    """Extinction, scattering and absorption efficiencies of a sphere.

    >>> q = mie_efficiencies(1.5, 1000.0)
    >>> 1.9 < q.q_ext < 2.1
    True
    """
    a, b = mie_coefficients(m, x)
    n = np.arange(1, a.size + 1)
    w = 2 * n + 1
    q_ext = 2.0 / x**2 * float(np.sum(w * (a.real + b.real)))
    q_sca = 2.0 / x**2 * float(np.sum(w * (np.abs(a) ** 2 + np.abs(b) ** 2)))
    # non-absorbing spheres give q_ext - q_sca at rounding level, either sign
    q_abs = max(q_ext - q_sca, 0.0)
    return MieEfficiencies(q_ext=q_ext, q_sca=q_sca, q_abs=q_abs)


def extinction_efficiency(m, diameter: float, wavelength: float) -> float:
    """Convenience wrapper: Q_ext for a sphere of ``diameter`` at ``wavelength``."""
    return mie_efficiencies(m, size_parameter(diameter, wavelength)).q_ext
