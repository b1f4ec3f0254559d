"""Noise channels and measurement operator sets.

Covers amplitude damping, the depolarising CNOT error, symmetric readout
flips and the two-outcome weak measurement ``{M, Mbar}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qlinalg import Branch, DensityMatrix, conjugate, kron, partial_trace, permute_qubits

COMPLETENESS_ATOL = 1e-12


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class KrausChannel:
    """Kraus operators on ``arity`` qubits, checked for completeness."""

    operators: tuple[np.ndarray, ...]
    arity: int = 1

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        dim = 1 << self.arity
        for k in ops:
            if k.shape != (dim, dim):
                raise ValueError(f"Kraus operator shape {k.shape} != {(dim, dim)}")
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        err = np.max(np.abs(self.completeness() - np.eye(dim)))
        if err > COMPLETENESS_ATOL:
            raise ValueError(f"Kraus operators incomplete (deviation {err:.3e})")

    def completeness(self) -> np.ndarray:
        return sum(k.conj().T @ k for k in self.operators)

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        return KrausChannel(
            tuple(kron(a, b) for a in self.operators for b in other.operators),
            self.arity + other.arity,
        )


# Both outcome sets and noise channels share the same container.
MeasurementSet = KrausChannel


@dataclass(frozen=True)
class DampingParams:
    r: float

    def __post_init__(self):
        _check_unit("r", self.r)


@dataclass(frozen=True)
class WeakMeasurementParams:
    q: float

    def __post_init__(self):
        _check_unit("q", self.q)


@dataclass(frozen=True)
class GateNoiseParams:
    """CNOT success probability ``y2`` and readout accuracy ``eta_m``."""

    y2: float = 1.0
    eta_m: float = 1.0

    def __post_init__(self):
        _check_unit("y2", self.y2)
        _check_unit("eta_m", self.eta_m)


def amplitude_damping(p: DampingParams | float) -> KrausChannel:
    """e0 = diag(1, sqrt(1-r)), e1 = sqrt(r)|0><1|."""
    r = p.r if isinstance(p, DampingParams) else _check_unit("r", p)
    e0 = np.array([[1, 0], [0, np.sqrt(1 - r)]], dtype=complex)
    e1 = np.array([[0, np.sqrt(r)], [0, 0]], dtype=complex)
    return KrausChannel((e0, e1))


def r_from_rate(gamma: float, t: float) -> float:
    """Decay probability ``1 - exp(-gamma * t)`` after time ``t``."""
    if gamma < 0 or t < 0:
        raise ValueError("rate and time must be non-negative")
    return float(-np.expm1(-gamma * t))


def apply_channel(rho: DensityMatrix, ch: KrausChannel, targets: Sequence[int]) -> DensityMatrix:
    """``sum_i K_i rho K_i^dagger`` with the channel acting on ``targets``.

    A one-qubit channel given several targets is applied to each of them
    independently.
    """
    targets = list(targets)
    if ch.arity == 1 and len(targets) > 1:
        for t in targets:
            rho = apply_channel(rho, ch, [t])
        return rho
    if len(targets) != ch.arity:
        raise ValueError(f"channel arity {ch.arity} != {len(targets)} targets")
    m = rho.matrix
    return DensityMatrix(sum(conjugate(m, k, targets) for k in ch.operators))


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def depolarize_pair(rho: DensityMatrix, a: int, b: int) -> DensityMatrix:
    """``Tr_{a,b}(rho) (x) I/4`` with the mixed factor back on qubits ``a``, ``b``."""
    n = rho.num_qubits
    rest = [q for q in range(n) if q not in (a, b)]
    mixed = np.eye(4, dtype=complex) / 4
    if not rest:
        return DensityMatrix(mixed)
    reduced = partial_trace(rho, rest)
    # current order: rest..., a, b -> move each to its original position
    order = rest + [a, b]
    return permute_qubits(DensityMatrix(kron(reduced.matrix, mixed)), order)


def noisy_cnot_apply(rho: DensityMatrix, control: int, target: int, y2: float) -> DensityMatrix:
    """CNOT that succeeds with probability ``y2`` and otherwise fully
    depolarises both of its qubits."""
    if control == target:
        raise ValueError("control and target must differ")
    y2 = _check_unit("y2", y2)
    ideal = conjugate(rho.matrix, CNOT, [control, target])
    if y2 == 1.0:
        return DensityMatrix(ideal)
    mixed = depolarize_pair(rho, control, target).matrix
    return DensityMatrix(y2 * ideal + (1 - y2) * mixed)


P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def readout_split(m: np.ndarray, qubit: int, eta_m: float) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalised post-states for reported bits 0 and 1.

    The qubit is projected onto its true value; only the reported bit is
    flipped, with probability ``1 - eta_m``.
    """
    on0 = conjugate(m, P0, [qubit])
    on1 = conjugate(m, P1, [qubit])
    if eta_m == 1.0:
        return on0, on1
    return eta_m * on0 + (1 - eta_m) * on1, eta_m * on1 + (1 - eta_m) * on0


def noisy_readout(rho: DensityMatrix, qubit: int, eta_m: float) -> list[Branch]:
    """Computational-basis measurement whose reported bit is wrong with
    probability ``1 - eta_m``; element ``b`` is the branch reporting ``b``."""
    eta_m = _check_unit("eta_m", eta_m)
    return [Branch.from_unnormalized(m) for m in readout_split(rho.matrix, qubit, eta_m)]


def weak_measurement_ops(p: WeakMeasurementParams | float) -> MeasurementSet:
    """``(M, Mbar)`` with M = diag(sqrt(1-q), 1) and Mbar = diag(sqrt(q), 0)."""
    q = p.q if isinstance(p, WeakMeasurementParams) else _check_unit("q", p)
    m = np.diag([np.sqrt(1 - q), 1.0]).astype(complex)
    mbar = np.diag([np.sqrt(q), 0.0]).astype(complex)
    return KrausChannel((m, mbar))


def apply_selective(rho: DensityMatrix, op, targets: Sequence[int]) -> Branch:
    """Apply the single-qubit operator ``op`` to every target and keep that branch.

    Returns the outcome probability and the renormalised state; an
    impossible outcome comes back as an empty branch rather than 0/0.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError("selective operator must be 2x2")
    m = rho.matrix
    for t in targets:
        m = conjugate(m, op, [t])
    return Branch.from_unnormalized(m, floor=0.0)
