"""Brute-force randomness from explicit joint atom-ancilla states.

Nothing here uses the closed-form eigenvalue expressions of ``schemes``: the
dephased joint state is assembled entry by entry from the Kraus operators and
diagonalized with the Jacobi solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InconsistentModel
from .numerics import von_neumann_entropy
from .schemes import MeasurementModel, SinglePhoton
from .states import QubitDensity, to_matrix, validate

DROP_PROB = 1e-15
MODEL_TOL = 1e-12


@dataclass(frozen=True)
class JointState:
    dims: tuple[int, int]
    matrix: np.ndarray


def _check_model(model: MeasurementModel) -> None:
    if len(model.povm) != len(model.kraus):
        raise InconsistentModel("POVM and Kraus lists differ in length")
    if model.completeness_error() > MODEL_TOL:
        raise InconsistentModel("POVM elements do not sum to the identity")
    if model.kraus_error() > MODEL_TOL:
        raise InconsistentModel("M_i^H M_i != E_i")


def qubit_register_flags(n: int) -> list[int]:
    """Ancilla indices of the outcome flags in an n-qubit register.

    Outcome 0 is |0...0>, outcome k has only qubit k excited.
    """
    return [0] + [1 << (n - k) for k in range(1, n + 1)]


def build_post_measurement(
    rho: QubitDensity,
    model: MeasurementModel,
    ancilla_dim: Optional[int] = None,
    flags: Optional[Sequence[int]] = None,
) -> list[tuple[float, JointState]]:
    """Outcome probabilities and normalized joint states M rho M^H / Pr (x) |flag><flag|.

    ``flags[i]`` is the ancilla basis index marking outcome ``i`` (default ``i``).
    Outcomes with probability below 1e-15 are dropped.
    """
    _check_model(model)
    validate(rho)
    n_out = len(model.kraus)
    dim = n_out if ancilla_dim is None else ancilla_dim
    flags = list(range(n_out)) if flags is None else list(flags)
    if len(flags) != n_out or len(set(flags)) != n_out or max(flags) >= dim:
        raise InconsistentModel("flags must be distinct ancilla indices, one per outcome")

    r = to_matrix(rho)
    out = []
    for m, e, f in zip(model.kraus, model.povm, flags):
        prob = float(np.trace(r @ e).real)
        if prob < DROP_PROB:
            continue
        flag = np.zeros((dim, dim))
        flag[f, f] = 1.0
        tau = np.kron(m @ r @ m.conj().T / prob, flag)
        out.append((prob, JointState((r.shape[0], dim), tau)))
    return out


def dephased_joint_state(
    rho: QubitDensity,
    model: MeasurementModel,
    ancilla_dim: Optional[int] = None,
    flags: Optional[Sequence[int]] = None,
) -> JointState:
    branches = build_post_measurement(rho, model, ancilla_dim, flags)
    dims = branches[0][1].dims
    mixed = sum(p * s.matrix for p, s in branches)
    return JointState(dims, mixed)


def oracle_randomness(
    rho: QubitDensity,
    model: MeasurementModel,
    ancilla_dim: Optional[int] = None,
    flags: Optional[Sequence[int]] = None,
) -> float:
    """S(sum_i Pr(i) tau_i) - S(rho), both by Jacobi diagonalization."""
    joint = dephased_joint_state(rho, model, ancilla_dim, flags)
    return von_neumann_entropy(joint.matrix) - von_neumann_entropy(to_matrix(rho))


def adversary_i_field_state(rho: QubitDensity, params: SinglePhoton) -> np.ndarray:
    """Reduced click-register state when the atom and its purification are traced out.

    The atom is purified as sqrt(rho11)|e>|0>_P + sqrt(rho00)|g>|1>_P, i.e. the
    pre-emission decay time is folded into the excited population.  Tensor
    order is (atom, purification, field).
    """
    validate(rho)
    survive = math.exp(-params.gamma_t)
    psi = np.zeros((2, 2, 2), dtype=complex)
    psi[1, 0, 0] = math.sqrt(rho.rho11) * math.sqrt(survive)
    psi[0, 0, 1] = math.sqrt(rho.rho11) * math.sqrt(-math.expm1(-params.gamma_t))
    psi[0, 1, 0] = math.sqrt(max(rho.rho00, 0.0))
    return np.einsum("apr,aps->rs", psi, psi.conj())


def adversary_i_check(rho: QubitDensity, params: SinglePhoton) -> float:
    """Conditional entropy of the click outcome given atom + purification.

    The field state is diagonal in the click basis, so dephasing leaves it
    unchanged and the result is 0.
    """
    rho_r = adversary_i_field_state(rho, params)
    if rho_r[0, 1] != 0 or rho_r[1, 0] != 0:
        raise InconsistentModel("field state is not diagonal in the click basis")
    dephased = np.diag(np.diag(rho_r))
    return von_neumann_entropy(dephased) - von_neumann_entropy(rho_r)
