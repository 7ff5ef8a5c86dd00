"""Seeded Monte Carlo for detection events and phase noise, plus Fock-space checks.

Randomness comes from Philox, a counter-based generator: the uniform used
for atom ``i`` is the ``i``-th 64-bit output of the stream keyed by the seed,
so any slice of atoms can be regenerated independently (see
:func:`uniforms`).  Auxiliary streams use the high 64 bits of the 128-bit key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import CutoffTooSmall, InsufficientBins, InvalidParams
from .numerics import central_interval_prob
from .schemes import Temporal, temporal_outcome_probs

U64 = 1 << 64
EVENT_STREAM = 0
PHASE_STREAM = 1
DISPERSION_STREAM = 2


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < U64:
        raise InvalidParams(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def philox(seed: int, stream: int = 0) -> np.random.Philox:
    return np.random.Philox(key=_check_seed(seed) | (int(stream) << 64))


def uniforms(seed: int, count: int, start: int = 0, stream: int = 0) -> np.ndarray:
    """Doubles in [0, 1) from counter positions ``start .. start + count - 1``."""
    bg = philox(seed, stream)
    # Philox emits 4 words per counter increment
    block, offset = divmod(int(start), 4)
    if block:
        bg.advance(block)
    raw = bg.random_raw(count + offset)[offset:]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def box_muller(u: np.ndarray) -> np.ndarray:
    """Standard normals from consecutive uniform pairs (output length len(u) // 2 * 2)."""
    u = u[: len(u) // 2 * 2]
    u1, u2 = u[0::2], u[1::2]
    r = np.sqrt(-2.0 * np.log1p(-u1))
    out = np.empty(len(u))
    out[0::2] = r * np.cos(2 * np.pi * u2)
    out[1::2] = r * np.sin(2 * np.pi * u2)
    return out


def standard_normals(seed: int, count: int, stream: int = PHASE_STREAM) -> np.ndarray:
    return box_muller(uniforms(seed, 2 * ((count + 1) // 2), stream=stream))[:count]


# --------------------------------------------------------------------------
# temporal detection events


@dataclass(frozen=True)
class EventRecord:
    outcome: int
    atom_index: int
    seed_stream: int


@dataclass(frozen=True)
class EventBatch(Sequence[EventRecord]):
    """Array-backed sequence of :class:`EventRecord` (outcome 0 = no click)."""

    outcomes: np.ndarray
    atom_index: np.ndarray
    seed_stream: int
    n_bins: int

    def __len__(self) -> int:
        return len(self.outcomes)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return EventRecord(int(self.outcomes[i]), int(self.atom_index[i]), self.seed_stream)

    def __iter__(self) -> Iterator[EventRecord]:
        for i in range(len(self)):
            yield self[i]

    def counts(self) -> np.ndarray:
        return np.bincount(self.outcomes, minlength=self.n_bins + 1)


def _categorical(probs: Sequence[float], u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def sample_temporal_events(
    rho11: float, params: Temporal, count: int, seed: int, start: int = 0
) -> EventBatch:
    """Draw detection outcomes for atoms ``start .. start + count - 1``."""
    if count < 1:
        raise InvalidParams("count must be >= 1")
    probs = temporal_outcome_probs(rho11, params)
    u = uniforms(seed, count, start=start, stream=EVENT_STREAM)
    return EventBatch(
        outcomes=_categorical(probs, u).astype(np.int64),
        atom_index=np.arange(start, start + count, dtype=np.int64),
        seed_stream=_check_seed(seed),
        n_bins=params.n_bins,
    )


@dataclass(frozen=True)
class LimitReport:
    n_clicks: int
    ks_statistic: float
    ks_critical: float
    dispersion_index: float
    dispersion_bounds: tuple[float, float]
    mean_bin: float
    mean_bin_expected: float
    mean_bin_sigma: float

    @property
    def ks_pass(self) -> bool:
        return self.ks_statistic <= self.ks_critical

    @property
    def dispersion_pass(self) -> bool:
        lo, hi = self.dispersion_bounds
        return self.n_clicks == 0 or lo <= self.dispersion_index <= hi

    @property
    def mean_pass(self) -> bool:
        return self.n_clicks == 0 or abs(self.mean_bin - self.mean_bin_expected) <= 4 * self.mean_bin_sigma

    @property
    def passed(self) -> bool:
        return self.ks_pass and self.dispersion_pass and self.mean_pass


def continuous_limit_check(
    rho11: float,
    gamma_t: float,
    n_bins: int,
    count: int,
    seed: int,
    alpha: float = 1e-3,
    windows: Optional[int] = None,
    mean_per_window: float = 20.0,
) -> LimitReport:
    """Check that fine time bins reproduce exponential arrival and Poisson counting.

    KS: clicked events are compared with the truncated exponential
    Gamma e^{-Gamma t} / (1 - e^{-Gamma T}).  The empirical CDF of binned
    times is evaluated at bin edges, where the geometric and exponential
    CDFs coincide; the continuous-case critical value is then conservative.

    Dispersion: ``windows`` groups of i.i.d. atoms (default ``count``), each
    sized so that about ``mean_per_window`` atoms click in the first bin.
    The per-group count is binomial in the single-atom window probability,
    which is exactly the marginal of the group's multinomial outcomes.
    """
    params = Temporal(gamma_t, n_bins)
    p = params.bin_prob
    if p > 0.01:
        raise InsufficientBins(f"bin probability {p:.4f} > 0.01; use more bins")

    batch = sample_temporal_events(rho11, params, count, seed)
    clicks = batch.outcomes[batch.outcomes > 0]
    n_clicks = len(clicks)

    k = np.arange(1, n_bins + 1)
    cdf_exp = -np.expm1(-gamma_t * k / n_bins) / -math.expm1(-gamma_t)
    pmf = np.diff(np.concatenate([[0.0], cdf_exp]))
    mean_expected = 1.0 / p - n_bins * (1 - p) ** n_bins / -math.expm1(-gamma_t)

    if n_clicks == 0:
        return LimitReport(0, 0.0, math.inf, 1.0, (0.98, 1.02), 0.0, mean_expected, 0.0)

    hist = np.bincount(clicks, minlength=n_bins + 1)[1:]
    ecdf = np.cumsum(hist) / n_clicks
    ks = float(np.max(np.abs(ecdf - cdf_exp)))
    ks_crit = float(stats.kstwo.ppf(1 - alpha, n_clicks))

    var_bin = float(np.sum(pmf * k**2) - np.sum(pmf * k) ** 2)
    mean_bin = float(np.mean(clicks))

    q_window = temporal_outcome_probs(rho11, params)[1]
    group = max(1, math.ceil(mean_per_window / q_window))
    gen = np.random.Generator(philox(seed, DISPERSION_STREAM))
    per_window = gen.binomial(group, q_window, size=windows or count)
    mean = float(per_window.mean())
    dispersion = float(per_window.var(ddof=1) / mean) if mean > 0 else 1.0

    return LimitReport(
        n_clicks=n_clicks,
        ks_statistic=ks,
        ks_critical=ks_crit,
        dispersion_index=dispersion,
        dispersion_bounds=(0.98, 1.02),
        mean_bin=mean_bin,
        mean_bin_expected=float(mean_expected),
        mean_bin_sigma=math.sqrt(var_bin / n_clicks),
    )


# --------------------------------------------------------------------------
# phase noise


def sample_phase_increments(sigma: float, count: int, seed: int) -> np.ndarray:
    if not sigma > 0:
        raise InvalidParams("sigma must be > 0")
    return sigma * standard_normals(seed, count)


def sample_phase_voltages(sigma: float, count: int, seed: int) -> np.ndarray:
    """Normalized interferometer voltages cos(dphi), dphi ~ N(0, sigma^2)."""
    return np.cos(sample_phase_increments(sigma, count, seed))


def max_window_probability(samples: np.ndarray, width: float) -> float:
    """Largest fraction of samples inside any closed interval of the given width."""
    x = np.sort(samples)
    hi = np.searchsorted(x, x + width, side="right")
    return float(np.max(hi - np.arange(len(x)))) / len(x)


@dataclass(frozen=True)
class MaxBinReport:
    empirical: float
    expected: float
    mc_sigma: float
    bits_empirical: float
    bits_expected: float

    @property
    def passed(self) -> bool:
        return abs(self.empirical - self.expected) <= 4 * self.mc_sigma


def max_bin_probability_check(sigma: float, bin_width: float, count: int, seed: int) -> MaxBinReport:
    """Compare the most likely width-``bin_width`` window of N(0, sigma^2) draws
    with 2 Phi(bin_width / (2 sigma)) - 1.

    The argument bin_width / (2 sigma) plays the role of lambda / sqrt(tau) in
    the phase-noise entropy formula.
    """
    if not bin_width > 0:
        raise InvalidParams("bin_width must be > 0")
    dphi = sample_phase_increments(sigma, count, seed)
    emp = max_window_probability(dphi, bin_width)
    q = central_interval_prob(bin_width / (2 * sigma))
    return MaxBinReport(
        empirical=emp,
        expected=q,
        mc_sigma=math.sqrt(q * (1 - q) / count) if q < 1 else 1.0 / count,
        bits_empirical=-math.log2(emp),
        bits_expected=-math.log2(q) + 0.0,
    )


# --------------------------------------------------------------------------
# truncated Fock space


@dataclass(frozen=True)
class FockDensity:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise InvalidParams("FockDensity needs a square matrix with cutoff >= 2")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise InvalidParams("FockDensity matrix is not Hermitian")
        if np.trace(m).real > 1 + 1e-10:
            raise InvalidParams("FockDensity trace exceeds 1")
        object.__setattr__(self, "matrix", m)

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0]

    @property
    def leakage(self) -> float:
        """Probability mass lost to truncation, 1 - tr(rho)."""
        return 1.0 - float(np.trace(self.matrix).real)


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Fock amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n < cutoff (not renormalized)."""
    amps = np.empty(cutoff, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, cutoff):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps


def coherent_density(alpha: complex, cutoff: int) -> FockDensity:
    v = coherent_amplitudes(alpha, cutoff)
    return FockDensity(np.outer(v, v.conj()))


def phase_diffusion_channel(rho: FockDensity, sigma: float) -> FockDensity:
    """Average of e^{-i d n} rho e^{i d n} over d ~ N(0, sigma^2)."""
    n = np.arange(rho.cutoff)
    diff = n[:, None] - n[None, :]
    return FockDensity(rho.matrix * np.exp(-(sigma**2) * diff**2 / 2))


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)


def min_cutoff(alpha: complex) -> int:
    return math.ceil(4 * abs(alpha) ** 2 + 8)


def default_cutoff(alpha: complex, tail: float = 1e-13) -> int:
    """Smallest cutoff >= 4|alpha|^2 + 8 whose Poisson tail P(N >= cutoff - 1) <= tail."""
    c = min_cutoff(alpha)
    mean = abs(alpha) ** 2
    while stats.poisson.sf(c - 2, mean) > tail:
        c += 1
    return c


def interference_expectation(
    alpha: complex, delta_phi: float, cutoff: Optional[int] = None, phi: float = 0.0
) -> float:
    """<a1^H a2 + a1 a2^H> for |alpha e^{i phi}> (x) |alpha e^{i (phi + delta_phi)}>.

    The two-mode state is held as a cutoff x cutoff amplitude array; the
    result approaches 2 |alpha|^2 cos(delta_phi).
    """
    if cutoff is None:
        cutoff = default_cutoff(alpha)
    if cutoff < min_cutoff(alpha):
        raise CutoffTooSmall(f"cutoff {cutoff} < 4|alpha|^2 + 8 = {min_cutoff(alpha)}")
    a = annihilation(cutoff)
    mode1 = coherent_amplitudes(alpha * np.exp(1j * phi), cutoff)
    mode2 = coherent_amplitudes(alpha * np.exp(1j * (phi + delta_phi)), cutoff)
    psi = np.outer(mode1, mode2)
    hop = a.conj().T @ psi @ a.T
    return float(2 * np.real(np.vdot(psi, hop)))
