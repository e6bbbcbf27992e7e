"""Published reference values used as regression targets.

Each row pairs a quoted value with the tolerance it is checked at and the
library call that reproduces it.
"""
from __future__ import annotations

import csv
import datetime
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .link_budget import (
    LossLedger,
    TurbulenceProfile,
    beam_divergence,
    combine_losses_logsum,
    fried_parameter,
    link_attenuation,
    reference_geometry,
)

__all__ = ["ReferenceValue", "REFERENCE_VALUES", "generate_reference_tables", "read_reference_table"]


@dataclass(frozen=True)
class ReferenceValue:
    name: str
    expected: float
    tolerance: float  # absolute
    unit: str
    source: str

    def check(self, value: float) -> bool:
        return abs(value - self.expected) <= self.tolerance


def _combo(a_nuc: float, a_atm: float = 16.0) -> Callable[[], float]:
    return lambda: combine_losses_logsum(LossLedger(a_atm=a_atm, a_nuc=a_nuc))


REFERENCE_VALUES: tuple[ReferenceValue, ...] = (
    ReferenceValue("downlink_clear_air_db", 16.0, 0.1, "dB", "400 km reference link, downlink"),
    ReferenceValue("uplink_clear_air_db", 34.0, 0.3, "dB", "400 km reference link, uplink"),
    ReferenceValue("fried_parameter_1550nm_m", 0.193, 0.193 * 0.01, "m", "HV 21 m/s, Cn2(0)=1.7e-14"),
    ReferenceValue("fried_parameter_500nm_m", 0.05, 0.05 * 0.05, "m", "HV 21 m/s, Cn2(0)=1.7e-14"),
    ReferenceValue("divergence_uplink_rad", 9.87e-7, 0.005e-7, "rad", "1 m transmit aperture"),
    ReferenceValue("divergence_downlink_rad", 9.87e-6, 0.005e-6, "rad", "0.1 m transmit aperture"),
    ReferenceValue("total_1000kt_0.5h_db", 55.6, 0.05, "dB", "debris 55.6 dB + air 16.0 dB"),
    ReferenceValue("total_1000kt_1h_db", 16.8, 0.05, "dB", "debris 9.12 dB + air 16.0 dB"),
    ReferenceValue("total_1000kt_2h_db", 16.2, 0.05, "dB", "debris 2.67 dB + air 16.0 dB"),
    ReferenceValue("total_100kt_0.5h_db", 20.1, 0.05, "dB", "debris 18.0 dB + air 16.0 dB"),
)

_REPRODUCE: dict[str, Callable[[], float]] = {
    "downlink_clear_air_db": lambda: link_attenuation(reference_geometry("downlink")),
    "uplink_clear_air_db": lambda: link_attenuation(reference_geometry("uplink")),
    "fried_parameter_1550nm_m": lambda: fried_parameter(reference_geometry("uplink"), TurbulenceProfile()),
    "fried_parameter_500nm_m": lambda: fried_parameter(
        reference_geometry("uplink", wavelength=500e-9), TurbulenceProfile()
    ),
    "divergence_uplink_rad": lambda: beam_divergence(reference_geometry("uplink")),
    "divergence_downlink_rad": lambda: beam_divergence(reference_geometry("downlink")),
    "total_1000kt_0.5h_db": _combo(55.6),
    "total_1000kt_1h_db": _combo(9.12),
    "total_1000kt_2h_db": _combo(2.67),
    "total_100kt_0.5h_db": _combo(18.0),
}


def reproduce(name: str) -> float:
    """Recompute a reference quantity with the library."""
    return _REPRODUCE[name]()


_COLUMNS = ["name", "expected", "tolerance", "unit", "source"]


def generate_reference_tables(out_dir) -> list[Path]:
    """Write ``reference_values.csv`` and ``regeneration.log`` to ``out_dir``.

    The log lists each recomputed value next to its target and whether it
    falls inside the tolerance.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = out_dir / "reference_values.csv"
    with table.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_COLUMNS)
        for ref in REFERENCE_VALUES:
            writer.writerow([ref.name, repr(ref.expected), repr(ref.tolerance), ref.unit, ref.source])

    log = out_dir / "regeneration.log"
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    lines = [f"# regenerated {stamp}"]
    for ref in REFERENCE_VALUES:
        value = reproduce(ref.name)
        status = "ok" if ref.check(value) else "MISMATCH"
        lines.append(
            f"{ref.name}: computed={value:.6g} expected={ref.expected:g} "
            f"+/- {ref.tolerance:g} {ref.unit} [{status}]"
        )
    log.write_text("\n".join(lines) + "\n")
    return [table, log]


def read_reference_table(path) -> list[ReferenceValue]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _COLUMNS:
            raise ValueError(f"{path}: expected columns {_COLUMNS}, got {reader.fieldnames}")
        return [
            ReferenceValue(
                row["name"], float(row["expected"]), float(row["tolerance"]), row["unit"], row["source"]
            )
            for row in reader
        ]
