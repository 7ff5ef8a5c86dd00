"""Closed-form intrinsic randomness for the four detection schemes.

Each scheme is a small frozen dataclass; ``SchemeParams`` is their union and
``scheme_from_json`` dispatches on the ``"scheme"`` discriminator.  The
calculators here use closed-form 2x2 eigenvalues only, so that
``oracle`` (which diagonalizes explicit joint states) is an independent check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, ClassVar, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateBin, InvalidParams, MissingState
from .numerics import binary_entropy, central_interval_prob, shannon_entropy
from .states import QubitDensity, validate

DEGENERATE_PROB = 1e-300


class Adversary(str, enum.Enum):
    """I: direct access to the atom.  II: holds only a purification of it."""

    I = "I"
    II = "II"

    @classmethod
    def parse(cls, value: Union[str, "Adversary"]) -> "Adversary":
        try:
            return cls(str(getattr(value, "value", value)).upper())
        except ValueError:
            raise InvalidParams(f"adversary must be 'I' or 'II', got {value!r}") from None


# --------------------------------------------------------------------------
# parameters


class _Params:
    scheme: ClassVar[str]

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"scheme": self.scheme}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


@dataclass(frozen=True)
class SinglePhoton(_Params):
    gamma_t: float
    scheme: ClassVar[str] = "single_photon"

    def __post_init__(self):
        if not self.gamma_t >= 0:
            raise InvalidParams(f"gamma_t must be >= 0, got {self.gamma_t!r}")


@dataclass(frozen=True)
class Temporal(_Params):
    gamma_t: float
    n_bins: int
    scheme: ClassVar[str] = "temporal"

    def __post_init__(self):
        if not self.gamma_t >= 0:
            raise InvalidParams(f"gamma_t must be >= 0, got {self.gamma_t!r}")
        if int(self.n_bins) != self.n_bins or self.n_bins < 1:
            raise InvalidParams(f"n_bins must be an integer >= 1, got {self.n_bins!r}")
        object.__setattr__(self, "n_bins", int(self.n_bins))

    @property
    def bin_prob(self) -> float:
        """p = 1 - exp(-gamma_t / n): emission probability within one bin."""
        return -math.expm1(-self.gamma_t / self.n_bins)


@dataclass(frozen=True)
class Spatial(_Params):
    click_probs: tuple[float, ...]
    scheme: ClassVar[str] = "spatial"

    def __post_init__(self):
        probs = tuple(float(p) for p in self.click_probs)
        if not probs:
            raise InvalidParams("spatial scheme needs at least one detector")
        if any(p < 0 or not math.isfinite(p) for p in probs) or abs(sum(probs) - 1) > 1e-9:
            raise InvalidParams(f"click_probs must be a probability vector, got {probs}")
        object.__setattr__(self, "click_probs", probs)


@dataclass(frozen=True)
class PhaseFluct(_Params):
    """Phase-noise QRNG parameters.

    ``a`` is the voltage-interval width, ``P`` the laser output power,
    ``tau_c`` the coherence time, ``tau`` the interferometer delay.
    ``A_param`` is an opaque positive constant entering the interval scale.
    """

    a: float
    P: float
    tau_c: float
    A_param: float
    tau: float
    scheme: ClassVar[str] = "phase_fluct"

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidParams(f"{f.name} must be finite and > 0, got {v!r}")

    @property
    def lam(self) -> float:
        return self.a / (4 * math.pi * self.P) * math.sqrt(self.tau_c / self.A_param)

    @property
    def scaled_width(self) -> float:
        """lambda / sqrt(tau), the argument of the normal CDF."""
        return self.lam / math.sqrt(self.tau)


SchemeParams = Union[SinglePhoton, Temporal, Spatial, PhaseFluct]

SCHEMES: dict[str, type] = {
    cls.scheme: cls for cls in (SinglePhoton, Temporal, Spatial, PhaseFluct)
}


def scheme_from_json(obj: Mapping[str, Any]) -> SchemeParams:
    obj = dict(obj)
    tag = obj.pop("scheme", None)
    if tag not in SCHEMES:
        raise InvalidParams(f"unknown scheme {tag!r}; expected one of {sorted(SCHEMES)}")
    cls = SCHEMES[tag]
    names = {f.name for f in fields(cls)}
    unknown = set(obj) - names
    if unknown:
        raise InvalidParams(f"unknown keys for {tag}: {sorted(unknown)}")
    missing = names - set(obj)
    if missing:
        raise InvalidParams(f"missing keys for {tag}: {sorted(missing)}")
    if cls is Spatial:
        obj["click_probs"] = tuple(obj["click_probs"])
    return cls(**obj)


# --------------------------------------------------------------------------
# measurement models


@dataclass(frozen=True)
class MeasurementModel:
    povm: tuple[np.ndarray, ...]
    kraus: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.povm)

    def completeness_error(self) -> float:
        total = sum(self.povm)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))

    def kraus_error(self) -> float:
        return max(
            float(np.max(np.abs(m.conj().T @ m - e))) for m, e in zip(self.kraus, self.povm)
        )


def _decay_model(survive: float, click_weights: Sequence[float]) -> MeasurementModel:
    povm = [np.diag([1.0, survive]).astype(complex)]
    kraus = [np.diag([1.0, math.sqrt(survive)]).astype(complex)]
    for w in click_weights:
        povm.append(np.diag([0.0, w]).astype(complex))
        kraus.append(np.array([[0.0, math.sqrt(w)], [0.0, 0.0]], dtype=complex))
    return MeasurementModel(tuple(povm), tuple(kraus))


def single_photon_model(params: SinglePhoton) -> MeasurementModel:
    return _decay_model(math.exp(-params.gamma_t), [-math.expm1(-params.gamma_t)])


def _temporal_click_weights(params: Temporal) -> list[float]:
    p = params.bin_prob
    return [p * (1.0 - p) ** (k - 1) for k in range(1, params.n_bins + 1)]


def temporal_model(params: Temporal) -> MeasurementModel:
    return _decay_model(math.exp(-params.gamma_t), _temporal_click_weights(params))


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class RandomnessReport:
    scheme: str
    adversary: Adversary
    exact_bits: Optional[float]
    lower_bound_bits: float
    outcome_probs: tuple[float, ...]
    notes: str = ""
    unbounded: bool = False
    params: dict[str, Any] = field(default_factory=dict, compare=False)

    def for_adversary(self, adversary: Adversary) -> "RandomnessReport":
        return replace(self, adversary=adversary)

    def to_json(self) -> dict[str, Any]:
        finite = not self.unbounded
        return {
            "scheme": self.scheme,
            "adversary": self.adversary.value,
            "exact_bits": self.exact_bits if finite else None,
            "lower_bound_bits": self.lower_bound_bits if finite else None,
            "unbounded": self.unbounded,
            "outcome_probs": list(self.outcome_probs),
            "notes": self.notes,
            "params": self.params,
        }


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def _qubit_eigs(a: float, d: float, c2: float) -> tuple[float, float]:
    """Eigenvalues of [[a, x], [x*, d]] with |x|^2 = c2, larger first.

    The smaller one is taken as det / larger to avoid cancellation near rank 1.
    """
    mu1 = 0.5 * (a + d) + math.sqrt(0.25 * (a - d) ** 2 + c2)
    mu2 = max(a * d - c2, 0.0) / mu1 if mu1 > 0 else 0.0
    return mu1, mu2


def _qubit_entropy(rho: QubitDensity) -> float:
    l1, l2 = _qubit_eigs(rho.rho00, rho.rho11, rho.coherence**2)
    return -_xlog2x(l1) - _xlog2x(l2)


def _decay_randomness(rho: QubitDensity, survive: float, click_weights: Sequence[float]) -> float:
    """-S(rho) + entropy of the dephased joint state for a decay-type POVM.

    The no-click block has eigenvalues mu_{1,2}; every click block is rank one
    with weight rho11 * w_k.
    """
    mu1, mu2 = _qubit_eigs(rho.rho00, survive * rho.rho11, survive * rho.coherence**2)
    joint = -_xlog2x(mu1) - _xlog2x(mu2) - sum(_xlog2x(rho.rho11 * w) for w in click_weights)
    return max(joint - _qubit_entropy(rho), 0.0)


def _decay_probs(rho: QubitDensity, survive: float, click_weights: Sequence[float]):
    return (rho.rho00 + survive * rho.rho11,) + tuple(rho.rho11 * w for w in click_weights)


def single_photon_exact(rho: QubitDensity, params: SinglePhoton) -> RandomnessReport:
    validate(rho)
    survive = math.exp(-params.gamma_t)
    weights = [-math.expm1(-params.gamma_t)]
    return RandomnessReport(
        scheme=params.scheme,
        adversary=Adversary.II,
        exact_bits=_decay_randomness(rho, survive, weights),
        lower_bound_bits=single_photon_lower_bound(rho.rho11, params),
        outcome_probs=_decay_probs(rho, survive, weights),
        params=params.to_json(),
    )


def single_photon_lower_bound(rho11: float, params: SinglePhoton) -> float:
    return rho11 * binary_entropy(math.exp(-params.gamma_t))


def temporal_outcome_probs(rho11: float, params: Temporal) -> tuple[float, ...]:
    """(Pr(0), Pr(1), ..., Pr(n)) for a state with excited population rho11."""
    rho = QubitDensity.from_populations(rho11)
    return _decay_probs(rho, math.exp(-params.gamma_t), _temporal_click_weights(params))


def temporal_exact(rho: QubitDensity, params: Temporal) -> RandomnessReport:
    validate(rho)
    survive = math.exp(-params.gamma_t)
    weights = _temporal_click_weights(params)
    return RandomnessReport(
        scheme=params.scheme,
        adversary=Adversary.II,
        exact_bits=_decay_randomness(rho, survive, weights),
        lower_bound_bits=temporal_lower_bound(rho.rho11, params),
        outcome_probs=_decay_probs(rho, survive, weights),
        params=params.to_json(),
    )


def temporal_lower_bound(rho11: float, params: Temporal) -> float:
    p = params.bin_prob
    if p == 0.0:
        return 0.0
    ratio = -math.expm1(-params.gamma_t) / p
    return rho11 * ratio * binary_entropy(p)


def temporal_lower_bound_series(rho11: float, params: Temporal) -> float:
    """Incoherent-state randomness written out term by term, before the
    geometric-sum simplification used by :func:`temporal_lower_bound`."""
    p, n = params.bin_prob, params.n_bins
    if rho11 == 0 or p == 0.0:
        return 0.0
    rho00 = 1.0 - rho11
    log_p, log_q, log_r = math.log2(p), math.log1p(-p) / math.log(2), math.log2(rho11)
    total = _xlog2x(rho00) + rho11 * log_r
    for k in range(1, n + 1):
        total -= (1 - p) ** (k - 1) * p * rho11 * (log_r + log_p + (k - 1) * log_q)
    total -= _xlog2x(rho00)
    total -= (1 - p) ** n * rho11 * (n * log_q + log_r)
    return total


def spatial_randomness(params: Spatial) -> RandomnessReport:
    bits = shannon_entropy(params.click_probs)
    return RandomnessReport(
        scheme=params.scheme,
        adversary=Adversary.II,
        exact_bits=bits,
        lower_bound_bits=bits,
        outcome_probs=params.click_probs,
        notes="emission direction is set by the vacuum modes; adversary-independent",
        params=params.to_json(),
    )


def phase_fluct_randomness(params: PhaseFluct, allow_unbounded: bool = False) -> RandomnessReport:
    """-log2 of the largest probability of a voltage interval.

    With ``allow_unbounded`` a vanishing interval probability yields a report
    flagged ``unbounded`` instead of raising :class:`DegenerateBin`.
    """
    q = central_interval_prob(params.scaled_width)
    if q <= DEGENERATE_PROB:
        if not allow_unbounded:
            raise DegenerateBin(
                f"interval probability {q:.3e} is degenerate; entropy is unbounded"
            )
        return RandomnessReport(
            scheme=params.scheme,
            adversary=Adversary.II,
            exact_bits=math.inf,
            lower_bound_bits=math.inf,
            outcome_probs=(q, 1.0 - q),
            notes="degenerate interval: cap by the sampled-voltage resolution",
            unbounded=True,
            params=params.to_json(),
        )
    bits = -math.log2(q) + 0.0
    return RandomnessReport(
        scheme=params.scheme,
        adversary=Adversary.II,
        exact_bits=bits,
        lower_bound_bits=bits,
        outcome_probs=(q, 1.0 - q),
        notes="outcome_probs = (max interval probability, remainder); adversary-independent",
        params=params.to_json(),
    )


ATOM_ACCESS_NOTE = (
    "adversary I holds the atom and the purification of the emitted field, "
    "so the click record is a classical state to her: 0 intrinsic bits"
)


def table_i_dispatch(
    scheme: SchemeParams,
    adversary: Union[str, Adversary],
    rho: Optional[QubitDensity] = None,
) -> RandomnessReport:
    adversary = Adversary.parse(adversary)
    if isinstance(scheme, Spatial):
        return spatial_randomness(scheme).for_adversary(adversary)
    if isinstance(scheme, PhaseFluct):
        return phase_fluct_randomness(scheme, allow_unbounded=True).for_adversary(adversary)
    if not isinstance(scheme, (SinglePhoton, Temporal)):
        raise InvalidParams(f"unsupported scheme {scheme!r}")

    if adversary is Adversary.I:
        probs: tuple[float, ...] = ()
        if rho is not None:
            validate(rho)
            model = single_photon_model(scheme) if isinstance(scheme, SinglePhoton) else temporal_model(scheme)
            probs = tuple(
                float(np.real(e[0, 0] * rho.rho00 + e[1, 1] * rho.rho11)) for e in model.povm
            )
        return RandomnessReport(
            scheme=scheme.scheme,
            adversary=adversary,
            exact_bits=0.0,
            lower_bound_bits=0.0,
            outcome_probs=probs,
            notes=ATOM_ACCESS_NOTE,
            params=scheme.to_json(),
        )

    if rho is None:
        raise MissingState(f"{scheme.scheme} under adversary II needs the atomic state")
    if isinstance(scheme, SinglePhoton):
        return single_photon_exact(rho, scheme)
    return temporal_exact(rho, scheme)


def exact_randomness(rho: QubitDensity, params: Union[SinglePhoton, Temporal]) -> float:
    if isinstance(params, SinglePhoton):
        return single_photon_exact(rho, params).exact_bits
    return temporal_exact(rho, params).exact_bits


def prop1_monotonicity_scan(
    rho11: float, params: Union[SinglePhoton, Temporal], grid_size: int = 256
) -> float:
    """Smallest finite-difference slope dR/d|rho01| over [0, sqrt(rho00 rho11)].

    Should be >= -1e-9 if randomness grows with atomic coherence.
    """
    if grid_size < 16:
        raise InvalidParams("grid_size must be at least 16")
    rho00 = 1.0 - rho11
    c_max = math.sqrt(max(rho00 * rho11, 0.0))
    if c_max == 0.0:
        return 0.0
    cs = np.linspace(0.0, c_max, grid_size)
    rs = [exact_randomness(QubitDensity(rho00, rho11, complex(c)), params) for c in cs]
    return float(np.min(np.diff(rs) / np.diff(cs)))
