"""Scenario configuration and orchestration of the three pipelines.

A scenario is a JSON document::

    {
      "schema_version": 1,
      "geometry": {"wavelength_nm": 1550, "link_distance_m": 4e5,
                   "transmitter_aperture_m": 0.1, "receiver_aperture_m": 1.0,
                   "zenith_angle_deg": 0, "start_height_m": 0,
                   "direction": "downlink"},
      "turbulence": {"rms_wind_speed": 21, "ground_turbulence": 1.7e-14},
      "a_air_db": 1.0,
      "disturbance": {"kind": "none"},
      "extra_losses_db": {"a_nuc": 9.12},
      "experiment": {"attenuations_db": [0, 10, 20], "pairs_per_basis": 10000},
      "output_path": "results"
    }

Angles are given in degrees. ``disturbance.kind`` is one of ``none``,
``cloud``, ``column`` or ``haze``; see :func:`parse_scenario` for their keys.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .disturbed import (
    HazeScenario,
    ParticleSizeDistribution,
    StabilizedCloud,
    cloud_for_yield,
    column_attenuation,
    haze_attenuation,
    read_column_csv,
    stabilized_cloud_attenuation,
)
from .experiment import ExperimentConfig, SweepRow, sweep_attenuation, write_sweep_csv
from .link_budget import (
    LinkGeometry,
    LossLedger,
    TurbulenceProfile,
    combine_losses_logsum,
    combine_losses_serial,
    link_attenuation,
    slant_factor,
)
from .mie import ComplexRefractiveIndex
from .sampler import SamplerConfig

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "Scenario",
    "ExperimentPlan",
    "load_scenario",
    "parse_scenario",
    "reference_scenario",
    "scenario_hash",
    "disturbance_term",
    "run_scenario",
]

SCHEMA_VERSION = 1

# ledger field that receives each disturbance kind
_DISTURBANCE_TERM = {"cloud": "a_cloud", "column": "a_nuc", "haze": "a_smoke"}


class ConfigError(ValueError):
    """Invalid scenario configuration; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = f"{source or '<config>'}:{line}: " if line else (f"{source}: " if source else "")
        super().__init__(where + message)


@dataclass(frozen=True)
class ExperimentPlan:
    attenuations_db: tuple[float, ...]
    pairs_per_basis: int = 10**4
    seed: int = 0
    sampler: SamplerConfig = field(default_factory=SamplerConfig)

    def configs(self) -> list[ExperimentConfig]:
        return [
            ExperimentConfig(attenuation_db=a, pairs_per_basis=self.pairs_per_basis, seed=self.seed)
            for a in self.attenuations_db
        ]


@dataclass(frozen=True)
class Scenario:
    geometry: LinkGeometry
    turbulence: TurbulenceProfile = field(default_factory=TurbulenceProfile)
    a_air_db: float = 1.0
    disturbance: Any = None  # None, StabilizedCloud, (path, index, elevation) or HazeScenario
    extra_losses_db: dict = field(default_factory=dict)
    experiment: ExperimentPlan | None = None
    output_path: Path | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def disturbance_kind(self) -> str:
        if self.disturbance is None:
            return "none"
        if isinstance(self.disturbance, StabilizedCloud):
            return "cloud"
        if isinstance(self.disturbance, HazeScenario):
            return "haze"
        return "column"


@dataclass(frozen=True)
class ColumnFile:
    path: Path
    refractive_index: ComplexRefractiveIndex
    elevation_angle: float = math.pi / 2


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


class _Reader:
    """Typed access to a JSON object with errors that point at the offending line."""

    def __init__(self, obj: dict, text: str | None, source: str | None, where: str = ""):
        if not isinstance(obj, dict):
            raise ConfigError(f"{where or 'config'} must be a JSON object", source=source)
        self.obj, self.text, self.source, self.where = obj, text, source, where
        self.used: set[str] = set()

    def fail(self, key: str, message: str):
        raise ConfigError(f"{self.where}{key}: {message}", _line_of(self.text, key), self.source)

    def get(self, key, kind=float, default=..., check=None):
        self.used.add(key)
        if key not in self.obj:
            if default is ...:
                self.fail(key, "missing required key")
            return default
        value = self.obj[key]
        try:
            if kind is float and isinstance(value, bool):
                raise TypeError
            value = kind(value)
        except (TypeError, ValueError):
            self.fail(key, f"expected {kind.__name__}, got {value!r}")
        if check is not None and not check(value):
            self.fail(key, f"invalid value {value!r}")
        return value

    def sub(self, key, required=False) -> "_Reader | None":
        self.used.add(key)
        if key not in self.obj:
            if required:
                self.fail(key, "missing required section")
            return None
        return _Reader(self.obj[key], self.text, self.source, f"{self.where}{key}.")

    def finish(self):
        unknown = sorted(set(self.obj) - self.used)
        if unknown:
            self.fail(unknown[0], "unknown key")


def _positive(v):
    return v > 0


def _non_negative(v):
    return v >= 0


def _index(value) -> ComplexRefractiveIndex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return ComplexRefractiveIndex(float(value[0]), float(value[1]))
    raise ValueError("refractive index must be [real, imag]")


def _parse_geometry(r: _Reader) -> LinkGeometry:
    direction = r.get("direction", str, "downlink", lambda v: v in ("uplink", "downlink"))
    geometry = LinkGeometry(
        wavelength=r.get("wavelength_nm", float, 1550.0, _positive) * 1e-9,
        link_distance=r.get("link_distance_m", float, 400e3, _positive),
        transmitter_aperture=r.get("transmitter_aperture_m", float, check=_positive),
        receiver_aperture=r.get("receiver_aperture_m", float, check=_positive),
        zenith_angle=math.radians(
            r.get("zenith_angle_deg", float, 0.0, lambda v: 0 <= v < 90)
        ),
        start_height=r.get("start_height_m", float, 0.0, _non_negative),
        direction=direction,
    )
    r.finish()
    return geometry


def _parse_disturbance(r: _Reader | None, base_dir: Path):
    if r is None:
        return None
    kind = r.get("kind", str, check=lambda v: v in ("none", "cloud", "column", "haze"))
    if kind == "none":
        out = None
    elif kind == "cloud":
        overrides = {}
        if "water_content_g_m3" in r.obj:
            overrides["water_content"] = r.get("water_content_g_m3", float, check=_non_negative)
        if "soil_loading_g_m3" in r.obj:
            overrides["soil_loading"] = r.get("soil_loading_g_m3", float, check=_non_negative)
        if "droplet_diameter_m" in r.obj:
            overrides["droplet_diameter"] = r.get("droplet_diameter_m", float, check=_positive)
        soil = r.sub("soil")
        if soil is not None:
            dist = ParticleSizeDistribution(
                median_diameter=soil.get("median_diameter_m", float, 130e-6, _positive),
                geometric_std=soil.get("geometric_std", float, 4.0, lambda v: v > 1),
                min_diameter=soil.get("min_diameter_m", float, 3e-6, _positive),
                max_diameter=soil.get("max_diameter_m", float, 450e-6, _positive),
                size_classes=soil.get("size_classes", int, 100, _positive),
                refractive_index=soil.get("refractive_index", _index, ComplexRefractiveIndex(1.55, 0.005)),
                material_density=soil.get("material_density_kg_m3", float, 2600.0, _positive),
            )
            soil.finish()
            overrides["soil_distribution"] = dist
        if "yield_kt" in r.obj:
            y = r.get("yield_kt", float)
            try:
                out = cloud_for_yield(y, **overrides)
            except ValueError as exc:
                r.fail("yield_kt", str(exc))
        else:
            out = StabilizedCloud(diameter=r.get("diameter_m", float, check=_positive), **overrides)
    elif kind == "column":
        path = Path(r.get("path", str))
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            r.fail("path", f"column file {path} does not exist")
        out = ColumnFile(
            path=path,
            refractive_index=r.get("refractive_index", _index, ComplexRefractiveIndex(1.55, 0.005)),
            elevation_angle=math.radians(
                r.get("elevation_deg", float, 90.0, lambda v: 0 < v <= 90)
            ),
        )
    else:
        out = HazeScenario(
            pm25=r.get("pm25", float, check=_non_negative),
            thickness=r.get("thickness_m", float, 3000.0, _non_negative),
            elevation_angle=math.radians(r.get("elevation_deg", float, 90.0, lambda v: 0 < v <= 90)),
            mass_extinction_efficiency=r.get("mass_extinction_efficiency", float, 3.0, _non_negative),
            humidity_valid=r.get("humidity_valid", bool, True),
        )
    r.finish()
    return out


def _parse_experiment(r: _Reader | None) -> ExperimentPlan | None:
    if r is None:
        return None
    atten = r.get("attenuations_db", lambda v: tuple(float(a) for a in v))
    if any(a < 0 for a in atten):
        r.fail("attenuations_db", "attenuations must be >= 0")
    sampler = SamplerConfig(
        n_chains=r.get("chains", int, 4, lambda v: v >= 2),
        burn_in=r.get("burn_in", int, 300, _non_negative),
        n_samples=r.get("samples_per_chain", int, 1000, _positive),
        check_every=r.get("check_every", int, 250, _positive),
        max_sweeps=r.get("max_sweeps", int, 20000, _positive),
        overlap_tolerance=r.get("overlap_tolerance", float, 1.0, _positive),
        seed=r.get("sampler_seed", int, 0),
        n_workers=r.get("workers", int, 1, _positive),
    )
    plan = ExperimentPlan(
        attenuations_db=atten,
        pairs_per_basis=r.get("pairs_per_basis", int, 10**4, _positive),
        seed=r.get("seed", int, 0),
        sampler=sampler,
    )
    r.finish()
    return plan


def parse_scenario(obj: dict, text: str | None = None, source: str | None = None,
                   base_dir: Path | None = None) -> Scenario:  # fmt: skip
    """Validate a decoded scenario document. ``text`` is used for line numbers."""
    base_dir = Path(base_dir or ".")
    r = _Reader(obj, text, source)
    version = r.get("schema_version", int)
    if version != SCHEMA_VERSION:
        r.fail("schema_version", f"unsupported schema version {version} (expected {SCHEMA_VERSION})")
    geometry = _parse_geometry(r.sub("geometry", required=True))
    t = r.sub("turbulence")
    turbulence = TurbulenceProfile()
    if t is not None:
        turbulence = TurbulenceProfile(
            rms_wind_speed=t.get("rms_wind_speed", float, 21.0, _non_negative),
            ground_turbulence=t.get("ground_turbulence", float, 1.7e-14, _non_negative),
        )
        t.finish()
    a_air = r.get("a_air_db", float, 1.0, _non_negative)
    disturbance = _parse_disturbance(r.sub("disturbance"), base_dir)
    extra = r.get("extra_losses_db", dict, {})
    for key, value in extra.items():
        if key not in LossLedger.__dataclass_fields__ or key == "a_atm":
            r.fail(key, "unknown loss term (use a_nuc, a_cloud, a_smoke, a_dir or a_aperture)")
        if not isinstance(value, (int, float)) or value < 0:
            r.fail(key, f"loss must be a number >= 0, got {value!r}")
    experiment = _parse_experiment(r.sub("experiment"))
    out = r.get("output_path", str, None)
    r.finish()
    return Scenario(
        geometry=geometry,
        turbulence=turbulence,
        a_air_db=a_air,
        disturbance=disturbance,
        extra_losses_db={k: float(v) for k, v in extra.items()},
        experiment=experiment,
        output_path=Path(out) if out else None,
        raw=obj,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", source=str(path)) from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{exc.msg} (column {exc.colno})", exc.lineno, str(path)) from None
    return parse_scenario(obj, text, str(path), path.parent)


def reference_scenario(direction: str = "downlink", **extra) -> dict:
    """Scenario document for the 400 km reference link (0.1 m space, 1 m ground aperture)."""
    space, ground = 0.1, 1.0
    d_t, d_r = (space, ground) if direction == "downlink" else (ground, space)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "geometry": {
            "wavelength_nm": 1550.0,
            "link_distance_m": 400e3,
            "transmitter_aperture_m": d_t,
            "receiver_aperture_m": d_r,
            "zenith_angle_deg": 0.0,
            "start_height_m": 0.0,
            "direction": direction,
        },
        "turbulence": {"rms_wind_speed": 21.0, "ground_turbulence": 1.7e-14},
        "a_air_db": 1.0,
        "disturbance": {"kind": "none"},
    }
    doc.update(extra)
    return doc


def scenario_hash(scenario: Scenario | dict) -> str:
    raw = scenario.raw if isinstance(scenario, Scenario) else scenario
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def disturbance_term(scenario: Scenario) -> float:
    """Attenuation in dB from the configured disturbance (0 for none)."""
    d = scenario.disturbance
    wavelength = scenario.geometry.wavelength
    if d is None:
        return 0.0
    if isinstance(d, StabilizedCloud):
        return stabilized_cloud_attenuation(d, wavelength)
    if isinstance(d, HazeScenario):
        return haze_attenuation(d, wavelength)
    column = read_column_csv(d.path, d.refractive_index)
    return column_attenuation(column, wavelength) * slant_factor(d.elevation_angle)


def with_wavelength(scenario: Scenario, wavelength_nm: float) -> Scenario:
    return replace(scenario, geometry=replace(scenario.geometry, wavelength=wavelength_nm * 1e-9))


@dataclass
class ScenarioResult:
    summary: dict
    sweep: list[SweepRow] | None = None
    files: list[Path] = field(default_factory=list)


def run_scenario(scenario: Scenario, output_path=None, seed: int | None = None) -> ScenarioResult:
    """Evaluate the link, the disturbance term and their combinations.

    Writes ``summary.json`` (and ``sweep.csv`` when an experiment is
    configured) under ``output_path`` if one is given or configured.
    """
    a_atm = link_attenuation(scenario.geometry, scenario.turbulence, scenario.a_air_db)
    a_dist = disturbance_term(scenario)
    terms = {"a_atm": a_atm, **scenario.extra_losses_db}
    kind = scenario.disturbance_kind
    if kind != "none":
        name = _DISTURBANCE_TERM[kind]
        terms[name] = terms.get(name, 0.0) + a_dist
    ledger = LossLedger(**terms)
    summary = {
        "a_atm_db": a_atm,
        "a_disturbance_db": a_dist,
        "a_total_logsum_db": combine_losses_logsum(ledger),
        "a_total_serial_db": combine_losses_serial(ledger),
        "terms_db": dict(ledger.items()),
        "disturbance": kind,
        "direction": scenario.geometry.direction.value,
        "wavelength_nm": round(scenario.geometry.wavelength * 1e9, 6),
        "scenario_hash": scenario_hash(scenario),
        "seed": seed if seed is not None else (scenario.experiment.seed if scenario.experiment else None),
    }
    result = ScenarioResult(summary)

    if scenario.experiment is not None:
        plan = scenario.experiment
        if seed is not None:
            plan = replace(plan, seed=seed)
        result.sweep = sweep_attenuation(plan.configs(), plan.sampler)

    out = output_path if output_path is not None else scenario.output_path
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "summary.json"
        path.write_text(json.dumps(summary, indent=2) + "\n")
        result.files.append(path)
        if result.sweep is not None:
            sweep_path = out / "sweep.csv"
            write_sweep_csv(result.sweep, sweep_path)
            result.files.append(sweep_path)
    return result
