"""Atomic qubit states, coherence, and Wigner-Weisskopf mode weights.

Basis order is (|g>, |e>) = (0, 1), so ``rho11`` is the excited-state
population and the decaying entry of every POVM element sits in slot 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .errors import InvalidParams, PositivityError, TraceError

STATE_TOL = 1e-12


@dataclass(frozen=True)
class QubitDensity:
    rho00: float
    rho11: float
    rho01: complex = 0j

    @property
    def rho10(self) -> complex:
        return complex(self.rho01).conjugate()

    @property
    def coherence(self) -> float:
        """|rho01|, the only coherence quantity the randomness formulas use."""
        return abs(self.rho01)

    @classmethod
    def from_populations(cls, rho11: float, rho01: complex = 0j) -> "QubitDensity":
        return validate(cls(1.0 - rho11, rho11, complex(rho01)))

    @classmethod
    def from_matrix(cls, m) -> "QubitDensity":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got {m.shape}")
        if abs(m[1, 0] - np.conj(m[0, 1])) > STATE_TOL:
            raise PositivityError("matrix is not Hermitian")
        return validate(cls(float(m[0, 0].real), float(m[1, 1].real), complex(m[0, 1])))

    @classmethod
    def pure(cls, amp_g: complex, amp_e: complex) -> "QubitDensity":
        norm = math.sqrt(abs(amp_g) ** 2 + abs(amp_e) ** 2)
        g, e = amp_g / norm, amp_e / norm
        return cls(abs(g) ** 2, abs(e) ** 2, complex(g * np.conj(e)))

    def to_json(self) -> dict[str, float]:
        return {
            "rho11": float(self.rho11),
            "re_rho01": float(complex(self.rho01).real),
            "im_rho01": float(complex(self.rho01).imag),
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "QubitDensity":
        allowed = {"rho11", "re_rho01", "im_rho01"}
        unknown = set(obj) - allowed
        if unknown:
            raise InvalidParams(f"unknown state keys: {sorted(unknown)}")
        if "rho11" not in obj:
            raise InvalidParams("state needs 'rho11'")
        rho01 = complex(float(obj.get("re_rho01", 0.0)), float(obj.get("im_rho01", 0.0)))
        return cls.from_populations(float(obj["rho11"]), rho01)


def validate(rho: QubitDensity) -> QubitDensity:
    """Return ``rho`` unchanged if it is a valid qubit density matrix."""
    r00, r11 = float(rho.rho00), float(rho.rho11)
    if not (math.isfinite(r00) and math.isfinite(r11) and cmath.isfinite(rho.rho01)):
        raise TraceError("non-finite state entries")
    if abs(r00 + r11 - 1.0) > STATE_TOL:
        raise TraceError(f"trace rho00 + rho11 = {r00 + r11!r} != 1")
    if r00 < -STATE_TOL or r11 < -STATE_TOL:
        raise PositivityError(f"negative population: rho00={r00!r}, rho11={r11!r}")
    excess = abs(rho.rho01) ** 2 - r00 * r11
    if excess > STATE_TOL:
        raise PositivityError(f"|rho01|^2 exceeds rho00*rho11 by {excess:.3e}")
    return rho


def to_matrix(rho: QubitDensity) -> np.ndarray:
    return np.array(
        [[rho.rho00, rho.rho01], [rho.rho10, rho.rho11]],
        dtype=complex,
    )


def l1_coherence(rho: QubitDensity) -> float:
    return 2.0 * abs(rho.rho01)


@dataclass(frozen=True)
class ModeAmplitudeParams:
    g: float
    detuning: float
    gamma: float
    t: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidParams(f"gamma must be positive, got {self.gamma!r}")
        if not self.t >= 0:
            raise InvalidParams(f"t must be non-negative, got {self.t!r}")


def ww_mode_weight(params: ModeAmplitudeParams) -> float:
    """|c_k(t)|^2 for one field mode; the position phase is dropped."""
    d, gamma, t = params.detuning, params.gamma, params.t
    num = abs(1.0 - cmath.exp(complex(-gamma * t / 2.0, d * t))) ** 2
    return params.g**2 * num / (d * d + gamma * gamma / 4.0)
