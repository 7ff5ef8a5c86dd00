"""Extraction sizing and a seeded Toeplitz hash over GF(2).

Sizing is asymptotic: N events at h bits/event give
floor(N h - 2 log2(1/eps)) output bits.  Finite-size smooth min-entropy
corrections are not applied.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Mapping

import numpy as np
from scipy.signal import fftconvolve

from .errors import InvalidParams, SeedLengthMismatch, UnboundedEntropyFlag
from .schemes import RandomnessReport

BLOCK = 1 << 15


@dataclass(frozen=True)
class ExtractionPlan:
    events: int
    bits_per_event: float
    epsilon: float
    output_len: int

    @classmethod
    def create(cls, events: int, bits_per_event: float, epsilon: float) -> "ExtractionPlan":
        if events < 1:
            raise InvalidParams("events must be >= 1")
        if not 0 < epsilon < 1:
            raise InvalidParams("epsilon must lie in (0, 1)")
        if not (bits_per_event >= 0 and math.isfinite(bits_per_event)):
            raise InvalidParams(f"bits_per_event must be finite and >= 0, got {bits_per_event!r}")
        budget = events * bits_per_event - 2 * math.log2(1 / epsilon)
        return cls(events, bits_per_event, epsilon, max(0, math.floor(budget)))

    def to_json(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "ExtractionPlan":
        plan = cls.create(int(obj["events"]), float(obj["bits_per_event"]), float(obj["epsilon"]))
        if "output_len" in obj and int(obj["output_len"]) != plan.output_len:
            raise InvalidParams("output_len does not match the sizing formula")
        return plan


def plan_extraction(report: RandomnessReport, events: int, epsilon: float) -> ExtractionPlan:
    if report.unbounded:
        raise UnboundedEntropyFlag(
            "report has unbounded entropy; cap it by the voltage resolution first"
        )
    return ExtractionPlan.create(events, report.lower_bound_bits, epsilon)


def _as_bits(bits) -> np.ndarray:
    b = np.asarray(bits, dtype=np.uint8).ravel()
    if b.size and b.max() > 1:
        raise InvalidParams("bit sequences may only contain 0 and 1")
    return b


def toeplitz_extract(raw_bits, plan: ExtractionPlan, seed_bits) -> np.ndarray:
    """Multiply raw bits by the Toeplitz matrix T[i, j] = seed[i - j + n - 1] over GF(2).

    ``seed_bits`` must hold len(raw_bits) + output_len - 1 bits.  The product
    is formed as a blockwise FFT convolution whose integer partial sums stay
    far below 2**53, so rounding is exact.
    """
    raw = _as_bits(raw_bits)
    seed = _as_bits(seed_bits)
    n, m = raw.size, plan.output_len
    if m == 0:
        return np.zeros(0, dtype=np.uint8)
    if seed.size != n + m - 1:
        raise SeedLengthMismatch(f"seed has {seed.size} bits, need {n + m - 1}")

    # out[i] = sum_j seed[i + n - 1 - j] raw[j] = (seed * raw)[i + n - 1]
    acc = np.zeros(m, dtype=np.int64)
    s = seed.astype(float)
    for j0 in range(0, n, BLOCK):
        r = raw[j0 : j0 + BLOCK].astype(float)
        if not r.any():
            continue
        lo = n - 1 - j0 - (r.size - 1)
        window = s[lo : lo + m + r.size - 1]
        conv = fftconvolve(window, r, mode="valid") if window.size > 64 else np.convolve(window, r, mode="valid")
        acc += np.rint(conv).astype(np.int64)
    return (acc & 1).astype(np.uint8)


def pack_bits(bits) -> bytes:
    """Little-endian within each byte: bit i goes to byte i // 8, position i % 8."""
    return np.packbits(_as_bits(bits), bitorder="little").tobytes()


def unpack_bits(data: bytes, count: int | None = None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return bits if count is None else bits[:count]


def encode_outcomes(outcomes, n_outcomes: int) -> np.ndarray:
    """Fixed-width binary encoding of outcome labels, least significant bit first."""
    width = max(1, math.ceil(math.log2(n_outcomes)))
    o = np.asarray(outcomes, dtype=np.int64)
    return ((o[:, None] >> np.arange(width)) & 1).astype(np.uint8).ravel()
