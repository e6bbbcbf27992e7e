"""Diffraction and turbulence limited attenuation of ground/satellite optical links.

Gaussian-beam geometry with a Hufnagel-Valley turbulence profile. All lengths
are in meters, angles in radians, attenuations in dB.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np
from scipy import integrate

__all__ = [
    "Direction",
    "LinkGeometry",
    "TurbulenceProfile",
    "LossLedger",
    "QuadratureError",
    "beam_divergence",
    "beam_waist_at",
    "hv_structure_constant",
    "integrated_turbulence",
    "fried_parameter",
    "atmospheric_divergence",
    "channel_attenuation",
    "link_attenuation",
    "combine_losses_logsum",
    "combine_losses_serial",
    "slant_factor",
    "reference_geometry",
]

TURBULENCE_CEILING = 100e3  # m; C_n^2 is negligible above this


class Direction(str, Enum):
    UPLINK = "uplink"
    DOWNLINK = "downlink"


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LinkGeometry:
    wavelength: float
    link_distance: float
    transmitter_aperture: float
    receiver_aperture: float
    zenith_angle: float = 0.0
    start_height: float = 0.0
    direction: Direction = Direction.DOWNLINK

    def __post_init__(self):
        for name in ("wavelength", "link_distance", "transmitter_aperture", "receiver_aperture"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if not 0.0 <= self.zenith_angle < math.pi / 2:
            raise ValueError(f"zenith_angle must be in [0, pi/2), got {self.zenith_angle}")
        if not self.start_height >= 0:
            raise ValueError(f"start_height must be >= 0, got {self.start_height}")
        object.__setattr__(self, "direction", Direction(self.direction))


@dataclass(frozen=True)
class TurbulenceProfile:
    rms_wind_speed: float = 21.0  # m/s
    ground_turbulence: float = 1.7e-14  # m^(-2/3)

    def __post_init__(self):
        if self.rms_wind_speed < 0 or self.ground_turbulence < 0:
            raise ValueError("wind speed and ground turbulence must be >= 0")


@dataclass(frozen=True)
class LossLedger:
    """Named attenuation terms in dB. ``None`` means the term is absent."""

    a_atm: float | None = None
    a_nuc: float | None = None
    a_cloud: float | None = None
    a_smoke: float | None = None
    a_dir: float | None = None
    a_aperture: float | None = None

    def __post_init__(self):
        for name, value in self.items():
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value}")

    def items(self) -> list[tuple[str, float]]:
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                out.append((f.name, float(value)))
        return out

    def values(self) -> list[float]:
        return [v for _, v in self.items()]


def reference_geometry(direction="downlink", wavelength: float = 1550e-9) -> LinkGeometry:
    """400 km ground/LEO link with a 0.1 m space and a 1 m ground aperture."""
    direction = Direction(direction)
    space, ground = 0.1, 1.0
    if direction is Direction.DOWNLINK:
        d_t, d_r = space, ground
    else:
        d_t, d_r = ground, space
    return LinkGeometry(
        wavelength=wavelength,
        link_distance=400e3,
        transmitter_aperture=d_t,
        receiver_aperture=d_r,
        direction=direction,
    )


def beam_divergence(geometry: LinkGeometry) -> float:
    """Diffraction divergence ``lambda / (pi w0)`` with ``w0 = D_T / 2``."""
    w0 = geometry.transmitter_aperture / 2.0
    if not w0 > 0:
        raise ValueError("transmitter aperture must be > 0")
    return geometry.wavelength / (math.pi * w0)


def beam_waist_at(z: float, w0: float, theta_d: float) -> float:
    if z < 0:
        raise ValueError(f"z must be >= 0, got {z}")
    if w0 < 0 or theta_d < 0:
        raise ValueError("w0 and theta_d must be >= 0")
    return math.hypot(w0, z * theta_d)


def hv_structure_constant(h, profile: TurbulenceProfile):
    """Hufnagel-Valley refractive-index structure constant C_n^2(h) in m^(-2/3).

    Accepts scalars or arrays of heights in meters.
    """
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise ValueError("height must be >= 0")
    v = profile.rms_wind_speed
    out = (
        5.94e-53 * (v / 27.0) ** 2 * h**10 * np.exp(-h / 1000.0)
        + 2.7e-16 * np.exp(-h / 1500.0)
        + profile.ground_turbulence * np.exp(-h / 100.0)
    )
    return float(out) if out.ndim == 0 else out


def _adaptive_simpson(f, a, b, rtol, max_depth=60):
    # recursive composite Simpson; the tolerance is relative to the whole integral
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = simpson(fa, fm, fb, a, b)
    # three points cannot see a narrow bump, so take the scale from a coarse grid
    grid = np.linspace(a, b, 513)
    scale = abs(integrate.simpson(f(grid), x=grid))
    tol = rtol * max(scale, abs(whole), np.finfo(float).tiny)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise QuadratureError(f"adaptive Simpson did not converge on [{a:g}, {b:g}]")
        return recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2.0, depth + 1
        )

    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def integrated_turbulence(
    geometry: LinkGeometry, profile: TurbulenceProfile, rtol: float = 1e-6
) -> float:
    """Vertical integral of C_n^2 from the start height to min(L, 100 km)."""
    top = min(geometry.link_distance, TURBULENCE_CEILING)
    bottom = geometry.start_height
    if top <= bottom:
        return 0.0
    return _adaptive_simpson(lambda h: hv_structure_constant(h, profile), bottom, top, rtol)


def fried_parameter(
    geometry: LinkGeometry, profile: TurbulenceProfile | None = None, rtol: float = 1e-6
) -> float:
    """Atmospheric coherence length r0 in meters.

    ``r0 = (0.423 k^2 sec(zeta) * integral C_n^2 dz)^(-3/5)``
    """
    profile = profile or TurbulenceProfile()
    k = 2.0 * math.pi / geometry.wavelength
    integral = integrated_turbulence(geometry, profile, rtol)
    if integral <= 0:
        return math.inf
    return (0.423 * k**2 / math.cos(geometry.zenith_angle) * integral) ** (-3.0 / 5.0)


def atmospheric_divergence(r0: float, wavelength: float) -> float:
    if not r0 > 0:
        raise ValueError(f"r0 must be > 0, got {r0}")
    return wavelength / r0


def channel_attenuation(geometry: LinkGeometry, theta_atm: float = 0.0, a_air: float = 0.0) -> float:
    """Attenuation in dB of the air plus diffraction/turbulence spread channel.

    ``theta_atm`` is always used as given; :func:`link_attenuation` decides
    whether turbulence spread applies for the link direction.
    """
    if theta_atm < 0 or a_air < 0:
        raise ValueError("theta_atm and a_air must be >= 0")
    theta_d = beam_divergence(geometry)
    L = geometry.link_distance
    denom = geometry.transmitter_aperture**2 + 4.0 * L**2 * (theta_d**2 + theta_atm**2)
    if not denom > 0:
        raise ValueError("degenerate link geometry")
    efficiency = -math.expm1(-2.0 * geometry.receiver_aperture**2 / denom)
    if efficiency <= 0:
        raise ValueError("degenerate link geometry: zero captured power")
    return a_air - 10.0 * math.log10(efficiency)


def link_attenuation(
    geometry: LinkGeometry, profile: TurbulenceProfile | None = None, a_air: float = 1.0
) -> float:
    """Clear-air attenuation with turbulence spread applied on uplinks only.

    Turbulence sits next to the ground, so it widens a beam launched upward
    but barely affects a beam that is already wide when it arrives.
    """
    theta_atm = 0.0
    if geometry.direction is Direction.UPLINK:
        theta_atm = atmospheric_divergence(fried_parameter(geometry, profile), geometry.wavelength)
    return channel_attenuation(geometry, theta_atm, a_air)


def combine_losses_logsum(ledger: LossLedger) -> float:
    """``10 log10(sum 10^(A_i / 10))`` over the terms present in the ledger."""
    values = ledger.values()
    if not values:
        raise ValueError("loss ledger is empty")
    top = max(values)
    # factor out the largest term so large dB values cannot overflow
    return top + 10.0 * math.log10(sum(10.0 ** ((v - top) / 10.0) for v in values))


def combine_losses_serial(ledger: LossLedger) -> float:
    """Plain dB sum, the usual rule for attenuators in series."""
    return float(sum(ledger.values()))


def slant_factor(elevation: float) -> float:
    """Path-length multiplier ``1 / sin(elevation)`` for a horizontally uniform layer."""
    if not 0 < elevation <= math.pi / 2:
        raise ValueError(f"elevation must be in (0, pi/2], got {elevation}")
    return 1.0 / math.sin(elevation)
