"""Acceptance checks, one per criterion, each at its stated tolerance.

Run with pytest (a summary block is printed at the end of the session) or
directly with ``python3 tests/test_acceptance.py`` for the pass/fail lines only.
"""
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from disturbed_fso.disturbed import (  # noqa: E402
    AtmosphericColumn,
    HazeScenario,
    Layer,
    ParticleSizeDistribution,
    SizeClasses,
    StabilizedCloud,
    cloud_for_yield,
    column_attenuation,
    extinction_cross_sections,
    haze_attenuation,
    stabilized_cloud_attenuation,
)
from disturbed_fso.experiment import ExperimentConfig, simulate_dataset  # noqa: E402
from disturbed_fso.link_budget import (  # noqa: E402
    LossLedger,
    combine_losses_logsum,
    fried_parameter,
    link_attenuation,
    reference_geometry,
)
from disturbed_fso.mie import mie_efficiencies  # noqa: E402
from disturbed_fso.quantum import (  # noqa: E402
    BASIS_PAIRS,
    DensityMatrixParams,
    MeasurementDataset,
    all_born_probabilities,
    cholesky_factor,
    concurrence,
    entanglement_of_formation,
    full_likelihood,
    singlet,
    werner,
)
from disturbed_fso.sampler import SamplerConfig, slice_sample_posterior  # noqa: E402

from oracles import (  # noqa: E402
    brute_force_mie,
    enumerate_sequence_probabilities,
    rayleigh_q_sca,
    werner_concurrence,
)

RESULTS: dict[str, tuple[bool, str]] = {}


def record(name, ok, detail):
    RESULTS[name] = (bool(ok), detail)
    return bool(ok), detail


def check_downlink():
    a = link_attenuation(reference_geometry("downlink"))
    return record("clear-air downlink 16.0 +/- 0.1 dB", abs(a - 16.0) <= 0.1, f"{a:.4f} dB")


def check_uplink():
    a = link_attenuation(reference_geometry("uplink"))
    return record("clear-air uplink 34.0 +/- 0.3 dB", abs(a - 34.0) <= 0.3, f"{a:.4f} dB")


def check_fried():
    r1550 = fried_parameter(reference_geometry("uplink", 1550e-9))
    r500 = fried_parameter(reference_geometry("uplink", 500e-9))
    scaling = (r1550 / r500) / (1550 / 500) ** 1.2
    ok = abs(r1550 / 0.193 - 1) <= 0.01 and abs(r500 / 0.05 - 1) <= 0.05 and abs(scaling - 1) <= 1e-6
    return record(
        "Fried parameter 0.193 m +/- 1%, 0.05 m +/- 5%, lambda^1.2 scaling",
        ok,
        f"r0(1550)={r1550:.5f} m, r0(500)={r500:.5f} m, scaling ratio-1={scaling - 1:.1e}",
    )


def check_combination():
    cases = [(55.6, 55.6), (9.12, 16.8), (2.67, 16.2), (18.0, 20.1)]
    got = [combine_losses_logsum(LossLedger(a_atm=16.0, a_nuc=a)) for a, _ in cases]
    ok = all(abs(g - want) <= 0.05 for g, (_, want) in zip(got, cases))
    return record(
        "log-sum loss combination totals within 0.05 dB", ok, ", ".join(f"{g:.3f}" for g in got)
    )


def check_mie():
    worst_balance = 0.0
    for re in np.linspace(1.01, 2.5, 10):
        for im in (0.0, 1e-4, 1e-2, 0.1, 1.0):
            for x in np.geomspace(0.01, 2000, 20):
                e = mie_efficiencies(complex(re, im), x)
                worst_balance = max(worst_balance, abs(e.q_ext - (e.q_sca + e.q_abs)) / e.q_ext)
    worst_rayleigh = max(
        abs(mie_efficiencies(m, x).q_sca / rayleigh_q_sca(m, x) - 1)
        for m in (1.33, 1.5, 1.55 + 0.005j, 2.0 + 0.5j)
        for x in (1e-3, 3e-3, 1e-2)
    )
    q_large = mie_efficiencies(1.5, 1000.0).q_ext
    worst_oracle = 0.0
    for m in (1.05, 1.33 + 1e-8j, 1.5 + 0.01j, 1.55 + 0.005j, 2.0 + 1.0j):
        for x in (0.1, 1.0, 5.0, 12.0, 30.0, 50.0):
            ref_ext, ref_sca = brute_force_mie(m, x)
            e = mie_efficiencies(m, x)
            worst_oracle = max(worst_oracle, abs(e.q_ext / ref_ext - 1), abs(e.q_sca / ref_sca - 1))
    ok = worst_balance <= 1e-9 and worst_rayleigh <= 0.01 and 1.9 <= q_large <= 2.1 and worst_oracle <= 1e-6
    return record(
        "Mie energy balance, Rayleigh limit, large-x limit, series oracle",
        ok,
        f"balance {worst_balance:.1e}, rayleigh {worst_rayleigh:.1e}, "
        f"Q_ext(1000)={q_large:.4f}, oracle {worst_oracle:.1e}",
    )


def check_column():
    classes = SizeClasses(np.array([5e-6]), np.array([1.0]), 1.5)
    sigma = extinction_cross_sections(classes, 1550e-9)[0]
    unit = AtmosphericColumn((Layer(1000.0, np.array([1.0 / (sigma * 1000.0)])),), classes)
    a_unit = column_attenuation(unit, 1550e-9)

    two = SizeClasses(np.array([1e-6, 20e-6]), np.array([0.5, 0.5]), 1.55 + 0.005j)
    whole = AtmosphericColumn((Layer(1000.0, np.array([1e6, 1e3])),), two)
    split = AtmosphericColumn((Layer(100.0, np.array([1e6, 1e3])), Layer(900.0, np.array([1e6, 1e3]))), two)
    layered = AtmosphericColumn((Layer(300.0, np.array([2e6, 0.0])), Layer(700.0, np.array([0.0, 5e3]))), two)
    merged = AtmosphericColumn((Layer(1000.0, np.array([6e5, 3.5e3])),), two)
    invariance = max(
        abs(column_attenuation(split, 1550e-9) / column_attenuation(whole, 1550e-9) - 1),
        abs(column_attenuation(layered, 1550e-9) / column_attenuation(merged, 1550e-9) - 1),
    )

    soil = StabilizedCloud(diameter=10e3, water_content=0.0, soil_distribution=ParticleSizeDistribution())
    spread = stabilized_cloud_attenuation(soil, 800e-9) / stabilized_cloud_attenuation(soil, 1550e-9) - 1
    ok = abs(a_unit - 10 * math.log10(math.e)) <= 1e-12 and invariance <= 1e-12 and abs(spread) <= 0.15
    return record(
        "column: 4.3429 dB per unit depth, split/merge invariance, 800 vs 1550 nm within 15%",
        ok,
        f"unit depth {a_unit:.6f} dB, invariance {invariance:.1e}, 800/1550-1={spread:+.2%}",
    )


def check_cloud():
    values = [stabilized_cloud_attenuation(cloud_for_yield(y), 1550e-9) for y in (10, 100, 1000)]
    ok = values[0] < values[1] < values[2] and min(values) >= 100
    return record(
        "stabilized cloud ordering 10 kt < 100 kt < 1 Mt, each >= 100 dB",
        ok,
        ", ".join(f"{v:.0f} dB" for v in values),
    )


def check_density_matrices():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10_000):
        rho = cholesky_factor(DensityMatrixParams.random(rng))
        worst = max(
            worst,
            abs(np.trace(rho) - 1),
            np.max(np.abs(rho - rho.conj().T)),
            max(0.0, -np.linalg.eigvalsh(rho).min()),
        )
    return record("10,000 random states: unit trace, Hermitian, PSD within 1e-10", worst <= 1e-10, f"worst {worst:.1e}")


def check_entanglement():
    errors = [
        abs(concurrence(singlet()) - 1),
        abs(entanglement_of_formation(singlet()) - 1),
        abs(concurrence(np.eye(4) / 4)),
        abs(concurrence(werner(0.5)) - werner_concurrence(0.5)),
    ]
    return record("concurrence/EOF of singlet, maximally mixed and Werner states", max(errors) <= 1e-10,
                  f"worst {max(errors):.1e}")  # fmt: skip


def check_likelihood():
    rng = np.random.default_rng(99)
    tau = DensityMatrixParams.random(rng).as_array()
    alpha = 0.35
    probs = all_born_probabilities(cholesky_factor(tau))
    worst = 0.0
    for b, pair in enumerate(BASIS_PAIRS):
        table = enumerate_sequence_probabilities(4, probs[b], alpha)
        # every possible record for this basis alone
        for counts, (n_hist, total) in table.items():
            data = MeasurementDataset({pair: counts})
            expected = math.log(total / n_hist)
            worst = max(worst, abs(full_likelihood(data, tau, alpha) - expected))
    # and a full nine-basis record, summed across bases
    data = MeasurementDataset()
    expected = 0.0
    for b, pair in enumerate(BASIS_PAIRS):
        table = enumerate_sequence_probabilities(4, probs[b], alpha)
        keys = sorted(table)
        counts = keys[rng.integers(len(keys))]
        data[pair] = counts
        expected += math.log(table[counts][1] / table[counts][0])
    worst = max(worst, abs(full_likelihood(data, tau, alpha) - expected))
    return record("log-likelihood equals exhaustive outcome-tree enumeration (N=4)", worst <= 1e-10,
                  f"worst {worst:.1e}")  # fmt: skip


def check_qse():
    sampler = SamplerConfig(n_chains=4, seed=2024)
    estimates = {}
    for db in (0.0, 20.0, 30.0):
        data = simulate_dataset(ExperimentConfig(attenuation_db=db, pairs_per_basis=10_000, seed=int(db)))
        estimates[db] = slice_sample_posterior(data, sampler).estimate()
    e0, e20, e30 = estimates[0.0], estimates[20.0], estimates[30.0]
    ok = (
        e0.eof_mean >= 0.97
        and abs(e0.alpha_mean - 1) <= 3 * e0.alpha_std
        and abs(e20.alpha_mean - 0.01) <= 3 * e20.alpha_std
        and e30.eof_std > e0.eof_std
    )
    detail = "; ".join(
        f"{db:g} dB: eof {e.eof_mean:.4f}+/-{e.eof_std:.4f}, alpha {e.alpha_mean:.5f}+/-{e.alpha_std:.1e}"
        + ("" if e.converged else " (not converged)")
        for db, e in estimates.items()
    )
    return record("end-to-end estimation at 0/20/30 dB with 1e4 pairs per basis", ok, detail)


def check_haze():
    base = haze_attenuation(HazeScenario(pm25=37.0, thickness=1234.0))
    lin = max(
        abs(haze_attenuation(HazeScenario(pm25=37.0 * k, thickness=1234.0)) / (k * base) - 1)
        for k in (0.5, 2.0, 7.3, 100.0)
    )
    lin = max(
        lin,
        max(
            abs(haze_attenuation(HazeScenario(pm25=37.0, thickness=1234.0 * k)) / (k * base) - 1)
            for k in (0.5, 2.0, 7.3, 100.0)
        ),
    )
    slant = max(
        abs(haze_attenuation(HazeScenario(pm25=37.0, thickness=1234.0, elevation_angle=e)) * math.sin(e) / base - 1)
        for e in np.radians([5.0, 15.0, 30.0, 45.0, 60.0, 89.0])
    )
    return record(
        "haze linear in PM2.5 and thickness, 1/sin(elevation) slant scaling",
        lin <= 1e-12 and slant <= 1e-12,
        f"linearity {lin:.1e}, slant {slant:.1e}",
    )


def _assert(result):
    ok, detail = result
    assert ok, detail


def test_clear_air_downlink():
    _assert(check_downlink())


def test_clear_air_uplink():
    _assert(check_uplink())


def test_fried_parameter():
    _assert(check_fried())


def test_loss_combination():
    _assert(check_combination())


def test_mie_engine():
    _assert(check_mie())


def test_column_attenuation():
    _assert(check_column())


def test_stabilized_cloud_ordering():
    _assert(check_cloud())


def test_density_matrix_construction():
    _assert(check_density_matrices())


def test_entanglement_metrics():
    _assert(check_entanglement())


def test_likelihood_enumeration():
    _assert(check_likelihood())


@pytest.mark.slow
def test_end_to_end_estimation():
    _assert(check_qse())


def test_haze_model():
    _assert(check_haze())


CHECKS = [
    check_downlink, check_uplink, check_fried, check_combination, check_mie, check_column,
    check_cloud, check_density_matrices, check_entanglement, check_likelihood, check_qse, check_haze,
]  # fmt: skip


def report_lines():
    return [f"{'PASS' if ok else 'FAIL'}  {name}: {detail}" for name, (ok, detail) in RESULTS.items()]


if __name__ == "__main__":
    for check in CHECKS:
        check()
        print(report_lines()[-1], flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
