"""Dense linear algebra for small qubit registers.

Ordering convention (used everywhere in the package): in a ``k``-qubit
register, qubit 0 is the most significant bit of the basis index.  The ket
``|b0 b1 ... b(k-1)>`` therefore sits at index ``int("b0b1...", 2)``, so
``|100>`` is index 4.  This is the left-to-right order in which kets are
usually written, and ``np.kron(a, b)`` places ``a`` on the leading qubits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 10
STATE_ATOL = 1e-10
PSD_ATOL = 1e-9


def _num_qubits(dim: int) -> int:
    k = int(dim).bit_length() - 1
    if dim < 1 or (1 << k) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return k


def _check_targets(targets: Sequence[int], total: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate qubit in {targets}")
    for t in targets:
        if not 0 <= t < total:
            raise ValueError(f"qubit {t} out of range for {total} qubits")
    return targets


class StateVector:
    """Pure state of ``num_qubits`` qubits (read-only amplitude array)."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        _num_qubits(amps.size)
        if normalize:
            amps = amps / np.linalg.norm(amps)
        amps.setflags(write=False)
        self.amplitudes = amps

    @classmethod
    def from_label(cls, label: str) -> "StateVector":
        """Computational basis state, e.g. ``StateVector.from_label("100")``."""
        amps = np.zeros(1 << len(label), dtype=complex)
        amps[int(label, 2)] = 1.0
        return cls(amps)

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.amplitudes.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()))

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


class DensityMatrix:
    """Density operator on ``num_qubits`` qubits (read-only matrix)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        _num_qubits(m.shape[0])
        m.setflags(write=False)
        self.matrix = m

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.matrix.shape[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def probabilities(self) -> np.ndarray:
        return np.clip(np.diag(self.matrix).real, 0.0, None)

    def normalized(self) -> "DensityMatrix":
        return DensityMatrix(self.matrix / self.trace)

    def validate(self, atol: float = STATE_ATOL, psd_atol: float = PSD_ATOL) -> None:
        """Raise ``ValueError`` unless Hermitian, unit trace and PSD."""
        m = self.matrix
        if not np.all(np.isfinite(m)):
            raise ValueError("non-finite entries")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > atol:
            raise ValueError(f"not Hermitian (max deviation {herm:.3e})")
        if abs(self.trace - 1.0) > atol:
            raise ValueError(f"trace {self.trace!r} != 1")
        lo = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
        if lo < -psd_atol:
            raise ValueError(f"not PSD (min eigenvalue {lo:.3e})")

    def __repr__(self) -> str:
        return f"DensityMatrix(num_qubits={self.num_qubits})"


@dataclass(frozen=True)
class Branch:
    """One outcome of a selective operation.

    ``state`` is the renormalised post-measurement state, or ``None`` when the
    branch is impossible (``probability == 0``).
    """

    state: DensityMatrix | None
    probability: float

    @property
    def empty(self) -> bool:
        return self.state is None

    @classmethod
    def from_unnormalized(cls, matrix: np.ndarray, floor: float = 0.0) -> "Branch":
        p = float(np.trace(matrix).real)
        if p <= floor:
            return cls(None, 0.0)
        return cls(DensityMatrix(matrix / p), p)


# ---------------------------------------------------------------- operations


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors)."""
    arrays = [np.asarray(op, dtype=complex) for op in ops]
    out = arrays[0]
    for a in arrays[1:]:
        out = np.kron(out, a)
    if max(out.shape) > (1 << MAX_QUBITS):
        raise ValueError(f"result exceeds {MAX_QUBITS} qubits: shape {out.shape}")
    return out


def embed(op, targets: Sequence[int], total: int) -> np.ndarray:
    """Full ``2**total`` operator acting as ``op`` on ``targets`` (in that order).

    ``targets[0]`` is the most significant qubit of ``op``'s own index, so
    non-adjacent and permuted placements are both expressed by the order of
    ``targets``.
    """
    op = np.asarray(op, dtype=complex)
    if total > MAX_QUBITS:
        raise ValueError(f"{total} qubits exceeds the {MAX_QUBITS}-qubit limit")
    targets = _check_targets(targets, total)
    m = len(targets)
    if op.shape != (1 << m, 1 << m):
        raise ValueError(f"operator shape {op.shape} does not act on {m} qubits")
    rest = [q for q in range(total) if q not in targets]
    full = np.kron(op, np.eye(1 << len(rest), dtype=complex))
    # full acts on the order targets + rest; move axes back to 0..total-1
    order = list(targets) + rest
    inv = np.argsort(order)
    t = full.reshape((2,) * (2 * total))
    t = t.transpose(list(inv) + [total + i for i in inv])
    return t.reshape(1 << total, 1 << total)


def apply_unitary_vector(vec: np.ndarray, op, targets: Sequence[int]) -> np.ndarray:
    """Apply ``op`` on ``targets`` to a raw amplitude vector without embedding."""
    n = _num_qubits(vec.size)
    targets = _check_targets(targets, n)
    m = len(targets)
    op = np.asarray(op, dtype=complex).reshape((2,) * (2 * m))
    psi = vec.reshape((2,) * n)
    out = np.tensordot(op, psi, axes=(list(range(m, 2 * m)), list(targets)))
    out = np.moveaxis(out, list(range(m)), list(targets))
    return out.reshape(-1)


def conjugate(rho: np.ndarray, op, targets: Sequence[int]) -> np.ndarray:
    """``K rho K^dagger`` for ``K`` acting on ``targets`` (raw matrices, no embedding)."""
    n = _num_qubits(rho.shape[0])
    targets = _check_targets(targets, n)
    m = len(targets)
    k = np.asarray(op, dtype=complex).reshape((2,) * (2 * m))
    t = rho.reshape((2,) * (2 * n))
    # left multiplication on row axes
    t = np.tensordot(k, t, axes=(list(range(m, 2 * m)), list(targets)))
    t = np.moveaxis(t, list(range(m)), list(targets))
    # right multiplication by K^dagger on column axes
    cols = [n + q for q in targets]
    t = np.tensordot(t, k.conj(), axes=(cols, list(range(m, 2 * m))))
    t = np.moveaxis(t, list(range(2 * n - m, 2 * n)), cols)
    return t.reshape(rho.shape)


def permute_qubits(state, perm: Sequence[int]):
    """Relabel qubits: old qubit ``i`` becomes new qubit ``perm[i]``.

    Works on :class:`StateVector` and :class:`DensityMatrix`; returns the
    same type.
    """
    n = state.num_qubits
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} qubits")
    # new axis j holds old axis i where perm[i] == j
    src = list(np.argsort(perm))
    if isinstance(state, StateVector):
        t = state.amplitudes.reshape((2,) * n).transpose(src)
        return StateVector(t.reshape(-1))
    t = state.matrix.reshape((2,) * (2 * n)).transpose(src + [n + s for s in src])
    return DensityMatrix(t.reshape(1 << n, 1 << n))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on ``keep`` (kept qubits retain their relative order).

    Implemented with bit masks over the basis indices: every kept pair
    ``(i, j)`` sums the entries whose traced-out bits agree.
    """
    n = rho.num_qubits
    keep = sorted(_check_targets(list(keep), n))
    if not keep:
        raise ValueError("keep must name at least one qubit")
    traced = [q for q in range(n) if q not in keep]
    idx = np.arange(1 << n)

    def pack(qubits):
        out = np.zeros_like(idx)
        for q in qubits:
            out = (out << 1) | ((idx >> (n - 1 - q)) & 1)
        return out

    kept_idx = pack(keep)
    env_idx = pack(traced)
    dk = 1 << len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    m = rho.matrix
    for e in range(1 << len(traced)):
        rows = np.flatnonzero(env_idx == e)
        sub = m[np.ix_(rows, rows)]
        # rows are ordered by full index; kept_idx of them is increasing too
        out[np.ix_(kept_idx[rows], kept_idx[rows])] += sub
    return DensityMatrix(out)


def pure_fidelity(target: StateVector, rho: DensityMatrix) -> float:
    """``<psi|rho|psi>`` for a pure target state."""
    a = target.amplitudes
    if rho.matrix.shape[0] != a.size:
        raise ValueError(
            f"dimension mismatch: state {a.size}, density {rho.matrix.shape[0]}"
        )
    return float(np.vdot(a, rho.matrix @ a).real)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of ``a - b``."""
    d = a.matrix - b.matrix
    return 0.5 * float(np.abs(np.linalg.eigvalsh((d + d.conj().T) / 2)).sum())


def is_unitary(u, atol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=complex)
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0)
