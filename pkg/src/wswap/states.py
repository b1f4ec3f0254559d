"""Named states, Charlie's measurement basis and the Pauli corrections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qlinalg import StateVector

SQRT2 = np.sqrt(2.0)

OUTCOME_LABELS = ("eta+", "eta-", "xi+", "xi-")


@dataclass(frozen=True)
class WFamilyParams:
    """Asymmetry ``n`` and relative phases ``gamma``, ``delta`` of the W family."""

    n: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError(f"n must be positive, got {self.n}")


def _ket(amps: dict[str, complex]) -> np.ndarray:
    v = np.zeros(8, dtype=complex)
    for label, a in amps.items():
        v[int(label, 2)] = a
    return v


def w_family(p: WFamilyParams = WFamilyParams()) -> StateVector:
    """(|100> + sqrt(n) e^{i gamma}|010> + sqrt(n+1) e^{i delta}|001>) / sqrt(2+2n)."""
    n = p.n
    return StateVector(
        _ket(
            {
                "100": 1.0,
                "010": np.sqrt(n) * np.exp(1j * p.gamma),
                "001": np.sqrt(n + 1) * np.exp(1j * p.delta),
            }
        )
        / np.sqrt(2 + 2 * n)
    )


def w_state() -> StateVector:
    """The n=1 member: (|100> + |010> + sqrt(2)|001>) / 2."""
    return StateVector(_ket({"100": 0.5, "010": 0.5, "001": SQRT2 / 2}))


def prototype_w() -> StateVector:
    """Symmetric W state (|100> + |010> + |001>) / sqrt(3)."""
    return StateVector(_ket({"100": 1, "010": 1, "001": 1}) / np.sqrt(3))


@dataclass(frozen=True)
class CharlieBasis:
    """Orthonormal basis of Charlie's three qubits.

    ``outcomes`` holds eta+, eta-, xi+, xi- in that order; ``completion``
    spans the remaining four dimensions.
    """

    outcomes: tuple[StateVector, ...]
    completion: tuple[StateVector, ...]
    labels: tuple[str, ...] = OUTCOME_LABELS

    @property
    def vectors(self) -> tuple[StateVector, ...]:
        return self.outcomes + self.completion

    def matrix(self) -> np.ndarray:
        """8x8 unitary whose rows are the conjugated basis vectors.

        Maps eta+ -> |000>, eta- -> |001>, xi+ -> |010>, xi- -> |011> and the
        completion vectors onto |100> ... |111>.
        """
        return np.array([v.amplitudes.conj() for v in self.vectors])

    def gram(self) -> np.ndarray:
        m = np.array([v.amplitudes for v in self.vectors])
        return m.conj() @ m.T


_N1_COMPLETION = (
    _ket({"010": 1, "001": -1}) / SQRT2,
    _ket({"110": 1, "101": -1}) / SQRT2,
    _ket({"011": 1}),
    _ket({"111": 1}),
)


def _gram_schmidt_completion(vectors: list[np.ndarray], tol: float = 1e-8) -> list[np.ndarray]:
    basis = [v / np.linalg.norm(v) for v in vectors]
    extra = []
    for i in range(8):
        e = np.zeros(8, dtype=complex)
        e[i] = 1.0
        for _ in range(2):  # second pass for numerical orthogonality
            for b in basis:
                e = e - np.vdot(b, e) * b
        nrm = np.linalg.norm(e)
        if nrm > tol:
            e = e / nrm
            basis.append(e)
            extra.append(e)
    return extra


def charlie_basis(p: WFamilyParams = WFamilyParams()) -> CharlieBasis:
    """eta_n^{+-}, xi_n^{+-} for the given family member, plus a completion.

    For n=1 with zero phases the completion is the fixed analytic set
    {(|010>-|001>)/sqrt2, (|110>-|101>)/sqrt2, |011>, |111>}; otherwise it is
    Gram-Schmidt over the computational basis in index order.
    """
    n = p.n
    g = np.sqrt(n) * np.exp(1j * p.gamma)
    d = np.sqrt(n + 1) * np.exp(1j * p.delta)
    norm = np.sqrt(2 + 2 * n)
    outcomes = [
        _ket({"010": 1, "001": g, "100": d}) / norm,
        _ket({"010": 1, "001": g, "100": -d}) / norm,
        _ket({"110": 1, "101": g, "000": d}) / norm,
        _ket({"110": 1, "101": g, "000": -d}) / norm,
    ]
    if n == 1 and p.gamma == 0 and p.delta == 0:
        completion = list(_N1_COMPLETION)
    else:
        completion = _gram_schmidt_completion(outcomes)
    return CharlieBasis(
        tuple(StateVector(v) for v in outcomes),
        tuple(StateVector(v) for v in completion),
    )


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PAULI["XZ"] = _PAULI["X"] @ _PAULI["Z"]


def pauli(sym: str) -> np.ndarray:
    """One of ``I``, ``X``, ``Z`` or ``XZ`` (the product X @ Z)."""
    try:
        return _PAULI[sym].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli symbol {sym!r}") from None
