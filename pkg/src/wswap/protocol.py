"""Matrix-level swapping pipeline and the closed-form reference formulas.

Qubits are numbered 0..5 here; Alice holds 0, 1 and sends 2, Bob sends 3, 4
and keeps 5.  Charlie measures 2, 3, 4 and the shared state lives on
(0, 1, 5).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .channels import amplitude_damping, apply_channel, apply_selective, weak_measurement_ops
from .qlinalg import (
    Branch,
    DensityMatrix,
    StateVector,
    conjugate,
    embed,
    kron,
    partial_trace,
    pure_fidelity,
)
from .states import CharlieBasis, WFamilyParams, charlie_basis, pauli, prototype_w, w_family, w_state

CHARLIE = (2, 3, 4)
SHARED = (0, 1, 5)
PROB_FLOOR = 1e-12

CORRECTIONS = {"eta+": "I", "eta-": "Z", "xi+": "X", "xi-": "XZ"}
CLASSICAL_BITS = {"eta+": "00", "eta-": "01", "xi+": "10", "xi-": "11"}
KEPT = ("eta+", "eta-")


@dataclass(frozen=True)
class SwapOutcome:
    """Charlie's result: a named outcome or ``complement<i>``."""

    label: str

    @property
    def is_named(self) -> bool:
        return self.label in CORRECTIONS

    @property
    def classical_bits(self) -> str | None:
        return CLASSICAL_BITS.get(self.label)

    @property
    def correction(self) -> str | None:
        return CORRECTIONS.get(self.label)

    @property
    def complement_index(self) -> int | None:
        if self.is_named:
            return None
        return int(self.label.removeprefix("complement"))


@dataclass(frozen=True)
class SwapEntry:
    outcome: SwapOutcome
    branch: Branch
    fidelity: float  # to the target W state; nan for an empty branch


@dataclass(frozen=True)
class SwapResult:
    entries: tuple[SwapEntry, ...]
    target: StateVector = field(default_factory=w_state)

    def __getitem__(self, label: str) -> SwapEntry:
        for e in self.entries:
            if e.outcome.label == label:
                return e
        raise KeyError(label)

    def probability(self, label: str) -> float:
        return self[label].branch.probability

    def fidelity(self, label: str) -> float:
        return self[label].fidelity

    @property
    def total_probability(self) -> float:
        return sum(e.branch.probability for e in self.entries)

    def average_state(self, labels=tuple(CORRECTIONS)) -> DensityMatrix:
        """Probability-weighted mixture of the given (non-empty) branches."""
        kept = [e for e in self.entries if e.outcome.label in labels and not e.branch.empty]
        total = sum(e.branch.probability for e in kept)
        return DensityMatrix(sum(e.branch.probability * e.branch.state.matrix for e in kept) / total)


def _fid(target: StateVector, b: Branch) -> float:
    return float("nan") if b.empty else pure_fidelity(target, b.state)


# ------------------------------------------------------------------- states


def combined_state(p: WFamilyParams | None = None) -> StateVector:
    """Alice's and Bob's W states side by side, qubit order 1..6."""
    w = w_state() if p is None else w_family(p)
    return StateVector(kron(w.amplitudes, w.amplitudes))


def damped_resources(r: float) -> tuple[DensityMatrix, DensityMatrix]:
    """Alice's state after her third qubit crosses the damping channel, and
    Bob's after his first two do."""
    ch = amplitude_damping(r)
    w = w_state().to_density()
    return apply_channel(w, ch, [2]), apply_channel(w, ch, [0, 1])


def damped_combined(r: float) -> DensityMatrix:
    a, b = damped_resources(r)
    return DensityMatrix(kron(a.matrix, b.matrix))


# -------------------------------------------------------------- measurement


def charlie_measure(rho: DensityMatrix, basis: CharlieBasis | None = None) -> list[tuple[SwapOutcome, Branch]]:
    """Project qubits 2, 3, 4 onto every basis vector and trace them out.

    Returns eight branches (four named, four complement) whose states live on
    the shared qubits (0, 1, 5), in that order.
    """
    basis = basis or charlie_basis()
    labels = list(basis.labels) + [f"complement{i}" for i in range(len(basis.completion))]
    out = []
    for label, v in zip(labels, basis.vectors):
        proj = np.outer(v.amplitudes, v.amplitudes.conj())
        post = conjugate(rho.matrix, proj, CHARLIE)
        p = float(np.trace(post).real)
        if p < PROB_FLOOR:
            branch = Branch(None, 0.0)
        else:
            reduced = partial_trace(DensityMatrix(post), SHARED)
            branch = Branch(reduced.normalized(), p)
        out.append((SwapOutcome(label), branch))
    return out


def apply_correction(b: Branch, o: SwapOutcome) -> Branch:
    """Bob's Pauli on his qubit (the last of the three shared qubits)."""
    if not o.is_named:
        raise ValueError(f"no correction defined for outcome {o.label!r}")
    if b.empty or o.correction == "I":
        return b
    return Branch(DensityMatrix(conjugate(b.state.matrix, pauli(o.correction), [2])), b.probability)


def _swap(rho: DensityMatrix, basis: CharlieBasis, target: StateVector) -> SwapResult:
    entries = []
    for o, b in charlie_measure(rho, basis):
        if o.is_named:
            b = apply_correction(b, o)
        entries.append(SwapEntry(o, b, _fid(target, b)))
    return SwapResult(tuple(entries), target)


def ideal_swap() -> SwapResult:
    return _swap(combined_state().to_density(), charlie_basis(), w_state())


def damped_swap(r: float) -> SwapResult:
    """Swap after amplitude damping of the three transmitted qubits."""
    return _swap(damped_combined(r), charlie_basis(), w_state())


def family_swap(p: WFamilyParams) -> SwapResult:
    """Swap of two copies of a general family member, measured in the
    matching basis and corrected with the n=1 Pauli table.

    Fidelities are taken against the same family member.
    """
    target = w_family(p)
    rho = combined_state(p).to_density()
    return _swap(rho, charlie_basis(p), target)


def prototype_swap() -> SwapResult:
    """The symmetric W state pushed through the same measurement and
    corrections; fidelities are to the symmetric W state."""
    target = prototype_w()
    rho = StateVector(kron(target.amplitudes, target.amplitudes)).to_density()
    return _swap(rho, charlie_basis(), target)


# ------------------------------------------------------------- purification


def purify(b: Branch, q: float) -> Branch:
    """Weak measurement M(q) on each of the three shared qubits, keeping
    the all-M outcome.  The probability is the conditional success."""
    if b.empty:
        return b
    m = weak_measurement_ops(q).operators[0]
    return apply_selective(b.state, m, range(b.state.num_qubits))


def pipeline_branches(r: float, q: float) -> list[tuple[SwapOutcome, Branch]]:
    """Damped swap, keep eta+-, purify.  Branch probabilities are absolute
    (swap outcome probability times purification success)."""
    swap = damped_swap(r)
    out = []
    for label in KEPT:
        e = swap[label]
        pb = purify(e.branch, q)
        if pb.empty or e.branch.probability * pb.probability < PROB_FLOOR:
            out.append((e.outcome, Branch(None, 0.0)))
        else:
            out.append((e.outcome, Branch(pb.state, e.branch.probability * pb.probability)))
    return out


class PipelineResult(NamedTuple):
    fidelity: float
    probability: float


def pipeline_state(r: float, q: float) -> DensityMatrix | None:
    """Mixture of the kept, purified branches; ``None`` if none survive."""
    kept = [b for _, b in pipeline_branches(r, q) if not b.empty]
    if not kept:
        return None
    total = sum(b.probability for b in kept)
    return DensityMatrix(sum(b.probability * b.state.matrix for b in kept) / total)


def full_pipeline(r: float, q: float) -> PipelineResult:
    """Final fidelity to |W> and total success probability over both eta outcomes."""
    branches = pipeline_branches(r, q)
    total = sum(b.probability for _, b in branches)
    state = pipeline_state(r, q)
    fid = float("nan") if state is None else pure_fidelity(w_state(), state)
    return PipelineResult(fid, total)


def xi_purification_report(r: float, q: float) -> dict[str, tuple[float, float]]:
    """Fidelity before and after purification for the discarded xi branches."""
    swap = damped_swap(r)
    w = w_state()
    report = {}
    for label in ("xi+", "xi-"):
        b = swap[label].branch
        report[label] = (_fid(w, b), _fid(w, purify(b, q)))
    return report


# ------------------------------------------------------------------- oracle


@dataclass(frozen=True)
class OracleReport:
    r: float
    q: float
    fid_ad: float
    fid_wm: float
    g_eta: float
    p_wm: float
    p_total_composed: float
    p_total_printed: float

    @property
    def p_total_discrepancy(self) -> float:
        return self.p_total_printed - self.p_total_composed


def oracle(r: float, q: float) -> OracleReport:
    """Closed-form fidelities and probabilities of the damped, purified swap.

    ``p_total_composed`` is 2 * p_wm * g_eta; ``p_total_printed`` is the
    polynomial (1-q^2)(1-r)(r-qr+1)/2, which differs from it for q > 0.
    """
    for name, v in (("r", r), ("q", q)):
        if not 0 <= v <= 1:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    g_eta = (1 - r * r) / 4
    p_wm = (1 - q) ** 2 * (r - q * r + 1) / (1 + r)
    return OracleReport(
        r=r,
        q=q,
        fid_ad=1 / (1 + r),
        fid_wm=1 / (1 + r * (1 - q)),
        g_eta=g_eta,
        p_wm=p_wm,
        p_total_composed=2 * p_wm * g_eta,
        p_total_printed=(1 - q * q) * (1 - r) * (r - q * r + 1) / 2,
    )


def damped_shared_state(r: float) -> DensityMatrix:
    """Closed form of the corrected eta-branch state:
    |W_AD><W_AD| + r/(1+r)|000><000| with |W_AD> = |W>/sqrt(1+r)."""
    w = w_state().amplitudes / np.sqrt(1 + r)
    m = np.outer(w, w.conj())
    m[0, 0] += r / (1 + r)
    return DensityMatrix(m)


def purified_shared_state(r: float, q: float) -> DensityMatrix:
    """Closed form of the purified state, proportional to
    |W><W| + r(1-q)|000><000|."""
    w = w_state().amplitudes
    m = np.outer(w, w.conj())
    m[0, 0] += r * (1 - q)
    return DensityMatrix(m / (1 + r * (1 - q)))


def embed_charlie_projector(v: StateVector) -> np.ndarray:
    """Full 64x64 operator I (x) I (x) |v><v| (x) I on the six protocol qubits."""
    return embed(np.outer(v.amplitudes, v.amplitudes.conj()), CHARLIE, 6)
