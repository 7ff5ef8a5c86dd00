"""Coherence sweeps and the verification suites behind ``spontaneous-qrng verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import oracle, schemes, simulate
from .errors import InvalidParams
from .schemes import PhaseFluct, SinglePhoton, Temporal
from .simulate import philox
from .states import QubitDensity

DEFAULT_N_LIST = (1, 2, 4, 8, 16)
DEFAULT_SWEEP_GAMMA_T = 1.0
VERIFY_STREAM = 7


@dataclass(frozen=True)
class SweepRow:
    n_bins: int
    l1_coherence: float
    exact_bits: float
    lower_bound_bits: float


def coherence_sweep(
    gamma_t: float = DEFAULT_SWEEP_GAMMA_T,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    coherences: Iterable[float] = tuple(np.linspace(0.0, 1.0, 21)),
) -> list[SweepRow]:
    """Temporal randomness for rho00 = rho11 = 1/2 across l1 coherence values in [0, 1]."""
    coherences = [float(c) for c in coherences]
    if any(not 0.0 <= c <= 1.0 for c in coherences):
        raise InvalidParams("l1 coherence must lie in [0, 1] for a balanced qubit")
    rows = []
    for n in n_list:
        params = Temporal(gamma_t, n)
        for c in coherences:
            report = schemes.temporal_exact(QubitDensity(0.5, 0.5, complex(c / 2)), params)
            rows.append(SweepRow(n, c, report.exact_bits, report.lower_bound_bits))
    return rows


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    statistic: float
    threshold: float
    detail: str = ""


def random_state(gen: np.random.Generator) -> QubitDensity:
    rho11 = float(gen.random())
    c = math.sqrt(rho11 * (1 - rho11)) * float(gen.random())
    return QubitDensity(1 - rho11, rho11, complex(c * np.exp(2j * np.pi * gen.random())))


def verify_oracle(seed: int, budget: int = 1000) -> list[Check]:
    gen = np.random.Generator(philox(seed, VERIFY_STREAM))
    worst_single = worst_temporal = 0.0
    for _ in range(budget):
        rho = random_state(gen)
        gamma_t = float(gen.exponential(2.0))
        n = int(gen.integers(1, 9))
        sp = SinglePhoton(gamma_t)
        worst_single = max(
            worst_single,
            abs(oracle.oracle_randomness(rho, schemes.single_photon_model(sp))
                - schemes.single_photon_exact(rho, sp).exact_bits),
        )
        tp = Temporal(gamma_t, n)
        worst_temporal = max(
            worst_temporal,
            abs(oracle.oracle_randomness(rho, schemes.temporal_model(tp))
                - schemes.temporal_exact(rho, tp).exact_bits),
        )
    worst_register = 0.0
    for n in (1, 2, 3):
        rho = random_state(gen)
        model = schemes.temporal_model(Temporal(float(gen.exponential(2.0)), n))
        compact = oracle.oracle_randomness(rho, model)
        full = oracle.oracle_randomness(rho, model, 2**n, oracle.qubit_register_flags(n))
        worst_register = max(worst_register, abs(compact - full))
    return [
        Check("oracle", "single_photon_vs_oracle", worst_single <= 1e-9, worst_single, 1e-9,
              f"{budget} random cases"),
        Check("oracle", "temporal_vs_oracle", worst_temporal <= 1e-9, worst_temporal, 1e-9,
              f"{budget} random cases, n <= 8"),
        Check("oracle", "compact_vs_qubit_register", worst_register <= 1e-10, worst_register, 1e-10,
              "n in {1, 2, 3}"),
    ]


def verify_prop1(seed: int, budget: int = 100, grid_size: int = 256) -> list[Check]:
    gen = np.random.Generator(philox(seed, VERIFY_STREAM + 1))
    cases: list[tuple[str, Callable[[float], object]]] = [
        ("single_photon", SinglePhoton),
        ("temporal_n2", lambda g: Temporal(g, 2)),
        ("temporal_n4", lambda g: Temporal(g, 4)),
        ("temporal_n8", lambda g: Temporal(g, 8)),
    ]
    pairs = [(float(gen.uniform(0.01, 0.99)), float(gen.exponential(2.0))) for _ in range(budget)]
    checks = []
    for name, make in cases:
        worst = min(schemes.prop1_monotonicity_scan(r, make(g), grid_size) for r, g in pairs)
        checks.append(Check("prop1", f"min_slope_{name}", worst >= -1e-9, worst, -1e-9,
                            f"{budget} (rho11, gamma_t) pairs, grid {grid_size}"))
    return checks


def verify_limits(seed: int, budget: int = 10**6, n_bins: int = 2048) -> list[Check]:
    rep = simulate.continuous_limit_check(1.0, 5.0, n_bins, budget, seed)
    return [
        Check("limits", "ks_truncated_exponential", rep.ks_pass, rep.ks_statistic, rep.ks_critical,
              f"{rep.n_clicks} clicks, alpha = 0.001"),
        Check("limits", "poisson_dispersion", rep.dispersion_pass, rep.dispersion_index, 0.02,
              "|index - 1| <= 0.02"),
        Check("limits", "geometric_mean_bin", rep.mean_pass,
              abs(rep.mean_bin - rep.mean_bin_expected), 4 * rep.mean_bin_sigma, "4 sigma"),
    ]


def verify_channel(seed: int, budget: int = 10**6) -> list[Check]:
    checks = []
    sigma = 0.3
    rho = simulate.coherent_density(1.0, 16)
    out = simulate.phase_diffusion_channel(rho, sigma)
    n = np.arange(16)
    expected = np.exp(-(sigma**2) * (n[:, None] - n[None, :]) ** 2 / 2)
    mask = np.abs(rho.matrix) > 1e-300
    ratio_err = float(np.max(np.abs(out.matrix[mask] / rho.matrix[mask] - expected[mask])))
    checks.append(Check("channel", "dephasing_ratios", ratio_err <= 1e-12, ratio_err, 1e-12))

    v = simulate.interference_expectation(1.0, 0.0)
    checks.append(Check("channel", "interference_alpha1_phase0", abs(v - 2) <= 1e-8, abs(v - 2), 1e-8))

    x = 0.674489750196
    bits = schemes.phase_fluct_randomness(_phase_params_for(x)).lower_bound_bits
    checks.append(Check("channel", "phase_fluct_one_bit", abs(bits - 1) <= 1e-9, abs(bits - 1), 1e-9))

    mb = simulate.max_bin_probability_check(1.0, 2 * x, budget, seed)
    checks.append(Check("channel", "max_bin_probability", mb.passed,
                        abs(mb.empirical - mb.expected), 4 * mb.mc_sigma, f"{budget} samples"))
    return checks


def _phase_params_for(scaled_width: float) -> PhaseFluct:
    """Phase-noise parameters whose lambda / sqrt(tau) equals ``scaled_width``."""
    return PhaseFluct(a=4 * math.pi * scaled_width, P=1.0, tau_c=1.0, A_param=1.0, tau=1.0)


SUITES = {
    "oracle": verify_oracle,
    "prop1": verify_prop1,
    "limits": verify_limits,
    "channel": verify_channel,
}


def run_suite(suite: str, seed: int, budget: int | None = None) -> list[Check]:
    names = list(SUITES) if suite == "all" else [suite]
    checks: list[Check] = []
    for name in names:
        if name not in SUITES:
            raise InvalidParams(f"unknown suite {name!r}; expected one of {sorted(SUITES)} or 'all'")
        fn = SUITES[name]
        checks.extend(fn(seed) if budget is None else fn(seed, budget))
    return checks

