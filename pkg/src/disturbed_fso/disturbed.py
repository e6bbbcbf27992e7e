"""Extinction-only loss terms for a nuclear-disturbed atmosphere.

Three sources are modeled: the stabilized debris cloud, transported debris
held in a vertically layered column, and PM2.5 haze from secondary fires.
Every photon that interacts with a particle is counted as lost, so each term
is ``10 log10(e) * optical_depth`` and is independent of link direction.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import stats

from .link_budget import slant_factor
from .mie import ComplexRefractiveIndex, mie_efficiencies, size_parameter

__all__ = [
    "DB_PER_NEPER",
    "SOIL_INDEX",
    "WATER_INDEX",
    "ParticleSizeDistribution",
    "SizeClasses",
    "Layer",
    "AtmosphericColumn",
    "StabilizedCloud",
    "HazeScenario",
    "lognormal_size_classes",
    "size_classes",
    "column_optical_depth",
    "column_attenuation",
    "stabilized_cloud_column",
    "stabilized_cloud_attenuation",
    "cloud_for_yield",
    "haze_attenuation",
    "stokes_velocity",
    "gaussian_puff_column",
    "read_column_csv",
    "write_column_csv",
]

DB_PER_NEPER = 10.0 * math.log10(math.e)  # 4.3429...

SOIL_INDEX = ComplexRefractiveIndex(1.55, 0.005)
WATER_INDEX = ComplexRefractiveIndex(1.318, 1.0e-4)

AIR_VISCOSITY = 1.8e-5  # Pa s
GRAVITY = 9.80665  # m/s^2


@dataclass(frozen=True)
class ParticleSizeDistribution:
    """Particle population discretized into size classes.

    Diameters are in meters. For ``kind="tabulated"`` supply ``diameters``
    and ``weights`` (number fractions); the lognormal fields are then only
    used for validation.
    """

    kind: str = "lognormal"
    median_diameter: float = 130e-6
    geometric_std: float = 4.0
    min_diameter: float = 3e-6
    max_diameter: float = 450e-6
    size_classes: int = 100
    refractive_index: ComplexRefractiveIndex = SOIL_INDEX
    material_density: float = 2600.0  # kg/m^3
    diameters: tuple[float, ...] | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("lognormal", "tabulated"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "lognormal":
            if not 0 < self.min_diameter < self.median_diameter < self.max_diameter:
                raise ValueError("need 0 < min_diameter < median_diameter < max_diameter")
            if not self.geometric_std > 1:
                raise ValueError("geometric_std must be > 1")
            if self.size_classes < 1:
                raise ValueError("size_classes must be >= 1")
        else:
            if self.diameters is None or self.weights is None:
                raise ValueError("tabulated distribution needs diameters and weights")
            if len(self.diameters) != len(self.weights) or not self.diameters:
                raise ValueError("diameters and weights must be non-empty and equally long")
            if min(self.diameters) <= 0 or min(self.weights) < 0 or sum(self.weights) <= 0:
                raise ValueError("diameters must be > 0 and weights >= 0 with a positive sum")
        if not self.material_density > 0:
            raise ValueError("material_density must be > 0")
        object.__setattr__(
            self, "refractive_index", ComplexRefractiveIndex.coerce(self.refractive_index)
        )

    @classmethod
    def monodisperse(cls, diameter, refractive_index, material_density=1000.0):
        return cls(
            kind="tabulated",
            diameters=(float(diameter),),
            weights=(1.0,),
            refractive_index=refractive_index,
            material_density=material_density,
        )


@dataclass(frozen=True)
class SizeClasses:
    """Discrete classes: radii (m), number fractions, complex index per class.

    ``refractive_index`` may be a single value, broadcast to every class.
    """

    radius: np.ndarray
    weight: np.ndarray
    refractive_index: np.ndarray | complex | ComplexRefractiveIndex = SOIL_INDEX

    def __post_init__(self):
        radius = np.atleast_1d(np.asarray(self.radius, dtype=float))
        weight = np.atleast_1d(np.asarray(self.weight, dtype=float))
        m = self.refractive_index
        if isinstance(m, ComplexRefractiveIndex):
            m = m.value
        m = np.broadcast_to(np.asarray(m, dtype=complex), radius.shape).copy()
        if weight.shape != radius.shape:
            raise ValueError("radius and weight must have the same length")
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "refractive_index", m)

    def __len__(self):
        return self.radius.size

    def mean_particle_volume(self) -> float:
        return float(np.sum(self.weight * 4.0 / 3.0 * np.pi * self.radius**3))


def lognormal_size_classes(distribution: ParticleSizeDistribution) -> list[tuple[float, float]]:
    """Split a truncated lognormal into log-spaced bins.

    Returns ``(radius, weight)`` pairs where the radius is that of the bin's
    geometric-midpoint diameter and the weight is the bin's share of the
    lognormal number CDF, renormalized over ``[min, max]``.
    """
    if distribution.kind != "lognormal":
        raise ValueError("lognormal_size_classes needs a lognormal distribution")
    d = distribution
    if not 0 < d.min_diameter < d.max_diameter:
        raise ValueError("degenerate size bounds")
    edges = np.geomspace(d.min_diameter, d.max_diameter, d.size_classes + 1)
    dist = stats.lognorm(s=math.log(d.geometric_std), scale=d.median_diameter)
    mass = np.diff(dist.cdf(edges))
    total = mass.sum()
    if not total > 0:
        raise ValueError("distribution has no probability inside [min, max]")
    weights = mass / total
    mids = np.sqrt(edges[:-1] * edges[1:])
    return list(zip((mids / 2.0).tolist(), weights.tolist()))


def size_classes(distribution: ParticleSizeDistribution) -> SizeClasses:
    if distribution.kind == "lognormal":
        pairs = lognormal_size_classes(distribution)
        radius = np.array([r for r, _ in pairs])
        weight = np.array([w for _, w in pairs])
    else:
        radius = np.asarray(distribution.diameters, dtype=float) / 2.0
        weight = np.asarray(distribution.weights, dtype=float)
        weight = weight / weight.sum()
    return SizeClasses(radius, weight, distribution.refractive_index)


@lru_cache(maxsize=4096)
def _q_ext(m_re: float, m_im: float, diameter: float, wavelength: float) -> float:
    x = size_parameter(diameter, wavelength)
    return mie_efficiencies(complex(m_re, m_im), x).q_ext


def extinction_cross_sections(classes: SizeClasses, wavelength: float) -> np.ndarray:
    """Per-particle extinction cross sections ``pi r^2 Q_ext`` in m^2."""
    q = np.array(
        [
            _q_ext(m.real, m.imag, float(2 * r), float(wavelength))
            for r, m in zip(classes.radius, classes.refractive_index)
        ]
    )
    return np.pi * classes.radius**2 * q


@dataclass(frozen=True)
class Layer:
    """One horizontal slab: thickness (m) and number density per class (1/m^3)."""

    thickness: float
    number_density: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.number_density, dtype=float)
        if not self.thickness > 0:
            raise ValueError(f"layer thickness must be > 0, got {self.thickness}")
        if np.any(n < 0):
            raise ValueError("number densities must be >= 0")
        object.__setattr__(self, "number_density", n)


@dataclass(frozen=True)
class AtmosphericColumn:
    """Layers along the line of sight, sharing one set of size classes."""

    layers: tuple[Layer, ...]
    classes: SizeClasses

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("column needs at least one layer")
        for layer in self.layers:
            if layer.number_density.shape != (len(self.classes),):
                raise ValueError("each layer needs one number density per size class")

    def densities(self) -> np.ndarray:
        return np.stack([layer.number_density for layer in self.layers])

    def thicknesses(self) -> np.ndarray:
        return np.array([layer.thickness for layer in self.layers])

    def particles_per_area(self) -> float:
        """Total particle count per unit cross-section along the path."""
        return float(np.sum(self.densities() * self.thicknesses()[:, None]))


def column_optical_depth(column: AtmosphericColumn, wavelength: float) -> float:
    sigma = extinction_cross_sections(column.classes, wavelength)
    per_layer = column.densities() @ sigma * column.thicknesses()
    return float(per_layer.sum())


def column_attenuation(column: AtmosphericColumn, wavelength: float) -> float:
    """Attenuation in dB summed over layers and size classes."""
    return DB_PER_NEPER * column_optical_depth(column, wavelength)


def _number_density_for_loading(classes: SizeClasses, loading_g_m3: float, density: float):
    # loading in g/m^3 -> per-class number density in 1/m^3
    mass_per_particle = density * classes.mean_particle_volume()  # kg
    total = loading_g_m3 * 1e-3 / mass_per_particle
    return total * classes.weight


@dataclass(frozen=True)
class StabilizedCloud:
    """Homogeneous stabilized cloud of water droplets plus lofted soil."""

    diameter: float
    water_content: float = 1.0  # g/m^3
    droplet_diameter: float = 12e-6
    soil_distribution: ParticleSizeDistribution = field(default_factory=ParticleSizeDistribution)
    soil_loading: float = 1.0  # g/m^3
    water_index: ComplexRefractiveIndex = WATER_INDEX

    def __post_init__(self):
        if not self.diameter > 0:
            raise ValueError("cloud diameter must be > 0")
        if self.water_content < 0 or self.soil_loading < 0:
            raise ValueError("water content and soil loading must be >= 0")
        if not self.droplet_diameter > 0:
            raise ValueError("droplet diameter must be > 0")


# rough cloud diameters at stabilization, per yield in kt
_CLOUD_DIAMETER_BY_YIELD = {10.0: 3e3, 100.0: 10e3, 1000.0: 30e3}


def cloud_for_yield(yield_kt: float, **overrides) -> StabilizedCloud:
    """Conceptual stabilized cloud for a 10 kt, 100 kt or 1 Mt surface burst."""
    try:
        diameter = _CLOUD_DIAMETER_BY_YIELD[float(yield_kt)]
    except KeyError:
        raise ValueError(
            f"no cloud size for {yield_kt} kt; known yields: {sorted(_CLOUD_DIAMETER_BY_YIELD)}"
        ) from None
    return StabilizedCloud(diameter=diameter, **overrides)


def stabilized_cloud_column(cloud: StabilizedCloud) -> AtmosphericColumn:
    """Single-layer column through the cloud center; path length = diameter.

    Classes are the soil bins followed by one water-droplet class.
    """
    soil = size_classes(cloud.soil_distribution)
    n_soil = _number_density_for_loading(
        soil, cloud.soil_loading, cloud.soil_distribution.material_density
    )
    r_w = cloud.droplet_diameter / 2.0
    n_water = cloud.water_content * 1e-3 / (1000.0 * 4.0 / 3.0 * np.pi * r_w**3)
    classes = SizeClasses(
        radius=np.append(soil.radius, r_w),
        weight=np.append(soil.weight, 0.0),
        refractive_index=np.append(
            soil.refractive_index, ComplexRefractiveIndex.coerce(cloud.water_index).value
        ),
    )
    density = np.append(n_soil, n_water)
    return AtmosphericColumn((Layer(cloud.diameter, density),), classes)


def stabilized_cloud_attenuation(cloud: StabilizedCloud, wavelength: float) -> float:
    return column_attenuation(stabilized_cloud_column(cloud), wavelength)


@dataclass(frozen=True)
class HazeScenario:
    """PM2.5 haze slab. ``mass_extinction_efficiency`` is in m^2/g."""

    pm25: float  # ug/m^3
    thickness: float = 3000.0
    elevation_angle: float = math.pi / 2
    mass_extinction_efficiency: float = 3.0
    humidity_valid: bool = True

    def __post_init__(self):
        if self.pm25 < 0:
            raise ValueError("pm25 must be >= 0")
        if not self.thickness >= 0:
            raise ValueError("thickness must be >= 0")
        if not 0 < self.elevation_angle <= math.pi / 2:
            raise ValueError("elevation angle must be in (0, pi/2]")
        if self.mass_extinction_efficiency < 0:
            raise ValueError("mass_extinction_efficiency must be >= 0")


def haze_attenuation(scenario: HazeScenario, wavelength: float = 1550e-9) -> float:
    """Slant-path haze attenuation in dB.

    Extinction is linear in PM2.5 mass, ``beta = gamma * C``; the model only
    holds below about 60 % relative humidity. ``wavelength`` is accepted for
    interface symmetry; ``gamma`` is the calibration for the wavelength in use.
    """
    if not scenario.humidity_valid:
        raise ValueError("haze mass-extinction model is only valid below 60% relative humidity")
    beta = scenario.mass_extinction_efficiency * scenario.pm25 * 1e-6  # 1/m
    return DB_PER_NEPER * beta * scenario.thickness * slant_factor(scenario.elevation_angle)


def stokes_velocity(diameter, density: float, viscosity: float = AIR_VISCOSITY):
    """Terminal settling speed (m/s) of a small sphere in still air."""
    d = np.asarray(diameter, dtype=float)
    return density * GRAVITY * d**2 / (18.0 * viscosity)


def gaussian_puff_column(
    cloud: StabilizedCloud,
    time_after_stabilization: float,
    diffusivity: float = 50.0,
    settling: bool = True,
) -> AtmosphericColumn:
    """Crude transport stand-in: an isotropic Gaussian puff growing from the cloud.

    The puff width grows as ``sigma^2 = sigma0^2 + 2 K t`` with ``sigma0`` set
    by the cloud radius. The through-center path stretches with ``sigma`` and
    the concentration falls with ``sigma^3``, so the path-integrated particle
    count falls as ``sigma^-2``. With ``settling`` each class also loses the
    fraction of the cloud depth it has fallen through at its Stokes speed.
    """
    if time_after_stabilization < 0:
        raise ValueError("time must be >= 0")
    if diffusivity < 0:
        raise ValueError("diffusivity must be >= 0")
    base = stabilized_cloud_column(cloud)
    if time_after_stabilization == 0:
        return base
    t = time_after_stabilization
    sigma0 = cloud.diameter / 2.0
    ratio = math.sqrt(1.0 + 2.0 * diffusivity * t / sigma0**2)  # sigma / sigma0

    density = base.layers[0].number_density / ratio**3
    if settling:
        densities = np.append(
            np.full(len(base.classes) - 1, cloud.soil_distribution.material_density), 1000.0
        )
        fallen = stokes_velocity(2 * base.classes.radius, densities) * t
        density = density * np.clip(1.0 - fallen / cloud.diameter, 0.0, 1.0)
    return replace(base, layers=(Layer(cloud.diameter * ratio, density),))


_CSV_HEADER = ["layer_index", "thickness_m", "class_index", "radius_m", "number_density_per_m3"]


def read_column_csv(
    path, refractive_index=SOIL_INDEX
) -> AtmosphericColumn:
    """Load a column from ``layer_index,thickness_m,class_index,radius_m,number_density_per_m3``.

    Layers must be numbered 0..n-1 without gaps, every layer must list the same
    class radii, and no value may be negative.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _CSV_HEADER:
            raise ValueError(f"{path}:1: expected header {','.join(_CSV_HEADER)}")
        rows: dict[int, dict] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
            try:
                li, ci = int(row[0]), int(row[2])
                thick, radius, dens = float(row[1]), float(row[3]), float(row[4])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if min(li, ci) < 0 or min(thick, radius, dens) < 0:
                raise ValueError(f"{path}:{lineno}: negative value")
            layer = rows.setdefault(li, {"thickness": thick, "classes": {}})
            if layer["thickness"] != thick:
                raise ValueError(f"{path}:{lineno}: inconsistent thickness for layer {li}")
            if ci in layer["classes"]:
                raise ValueError(f"{path}:{lineno}: duplicate class {ci} in layer {li}")
            layer["classes"][ci] = (radius, dens)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if sorted(rows) != list(range(len(rows))):
        raise ValueError(f"{path}: layer indices must be contiguous from 0, got {sorted(rows)}")

    first = rows[0]["classes"]
    class_ids = sorted(first)
    if class_ids != list(range(len(class_ids))):
        raise ValueError(f"{path}: class indices must be contiguous from 0")
    radius = np.array([first[c][0] for c in class_ids])
    layers = []
    for li in range(len(rows)):
        cls = rows[li]["classes"]
        if sorted(cls) != class_ids or any(cls[c][0] != first[c][0] for c in class_ids):
            raise ValueError(f"{path}: layer {li} does not list the same size classes as layer 0")
        layers.append(Layer(rows[li]["thickness"], np.array([cls[c][1] for c in class_ids])))
    if np.any(radius <= 0):
        raise ValueError(f"{path}: radii must be > 0")
    weight = np.full(radius.size, 1.0 / radius.size)
    classes = SizeClasses(radius, weight, ComplexRefractiveIndex.coerce(refractive_index))
    return AtmosphericColumn(tuple(layers), classes)


def write_column_csv(column: AtmosphericColumn, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_HEADER)
        for li, layer in enumerate(column.layers):
            for ci, (r, n) in enumerate(zip(column.classes.radius, layer.number_density)):
                writer.writerow([li, repr(layer.thickness), ci, repr(float(r)), repr(float(n))])
