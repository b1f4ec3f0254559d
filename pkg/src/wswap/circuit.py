"""Gate-level circuits and exact executors.

A :class:`Circuit` is an ordered list of :class:`GateOp`.  Two executors are
provided: a pure statevector one (no noise, no measurement) with an exact
branch enumerator, and a density-matrix one that enumerates every classical
outcome with its exact probability and inserts CNOT / readout noise when
configured.  Shot sampling draws from that exact distribution.

Classical bitstrings are written with bit 0 leftmost.

Text format (one op per line, ``#`` starts a comment)::

    QUBITS 6
    CLBITS 3
    RY 2 1.5707963267948966
    CNOT 2 0
    UNITARY 2 3 4 <re00> <im00> <re01> <im01> ...
    AD 2 0.3
    MEASURE 2 -> 0
    CONDITIONAL 2 Z 5
    BARRIER

Qubit indices are bare integers; parameters are floats written with a
decimal point or exponent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .channels import (
    CNOT,
    GateNoiseParams,
    amplitude_damping,
    noisy_cnot_apply,
    readout_split,
)
from .qlinalg import (
    Branch,
    DensityMatrix,
    StateVector,
    apply_unitary_vector,
    conjugate,
    embed,
    is_unitary,
    partial_trace,
    pure_fidelity,
)
from .states import charlie_basis, pauli, w_state

PROB_FLOOR = 1e-12
PRNG_ALGORITHM = "numpy PCG64"

ONE_QUBIT = {"X", "Z", "H", "RX", "RY"}
UNITARY_KINDS = ONE_QUBIT | {"CNOT", "CU", "UNITARY"}
KINDS = UNITARY_KINDS | {"MEASURE", "BARRIER", "CONDITIONAL", "AD"}


class UnsupportedModeError(ValueError):
    """Requested executor cannot run this circuit (e.g. noise on statevectors)."""


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def cu_matrix(theta: float, phi: float = 0.0, lam: float = 0.0, gamma: float = 0.0) -> np.ndarray:
    """Controlled rotation in the basis ordered (target, control), i.e. the
    control is the least significant index bit.

    ``gamma`` multiplies the controlled block by ``exp(i gamma)``; at
    ``gamma = 0`` this is exactly the textbook 4x4 form.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    g = np.exp(1j * gamma)
    m = np.eye(4, dtype=complex)
    m[1, 1] = g * np.exp(-0.5j * (phi + lam)) * c
    m[1, 3] = -g * np.exp(-0.5j * (phi - lam)) * s
    m[3, 1] = g * np.exp(0.5j * (phi - lam)) * s
    m[3, 3] = g * np.exp(0.5j * (phi + lam)) * c
    return m


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple[int, ...] = ()
    params: tuple[float, ...] = ()
    cbit: int | None = None
    inner: "GateOp | None" = None
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind}: repeated qubit in {self.qubits}")
        if self.kind == "UNITARY" and self.matrix is not None:
            m = np.array(self.matrix, dtype=complex)
            if m.shape != (1 << len(self.qubits),) * 2:
                raise ValueError(f"UNITARY matrix {m.shape} does not match {len(self.qubits)} qubits")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        if self.kind in UNITARY_KINDS and not is_unitary(self.unitary()):
            raise ValueError(f"{self.kind} operator is not unitary")

    def unitary(self) -> np.ndarray:
        """Matrix on ``self.qubits`` (in that order)."""
        k = self.kind
        if k in ("X", "Z"):
            return pauli(k)
        if k == "H":
            return H
        if k == "RX":
            return rx(self.params[0])
        if k == "RY":
            return ry(self.params[0])
        if k == "CNOT":
            return CNOT
        if k == "CU":
            return cu_matrix(*self.params)
        if k == "UNITARY":
            return self.matrix
        raise ValueError(f"{k} has no unitary")

    @property
    def targets(self) -> tuple[int, ...]:
        """Qubit order matching :meth:`unitary`'s index layout."""
        if self.kind == "CU":
            control, target = self.qubits
            return (target, control)
        return self.qubits

    def to_line(self) -> str:
        if self.kind == "CONDITIONAL":
            return f"CONDITIONAL {self.cbit} {self.inner.to_line()}"
        parts = [self.kind, *map(str, self.qubits)]
        if self.kind == "UNITARY":
            flat = self.matrix.reshape(-1)
            parts += [repr(float(v)) for z in flat for v in (z.real, z.imag)]
        else:
            parts += [repr(float(p)) for p in self.params]
        if self.kind == "MEASURE":
            parts += ["->", str(self.cbit)]
        return " ".join(parts)


_INT = re.compile(r"^\d+$")


def parse_op(line: str) -> GateOp:
    tokens = line.split()
    kind = tokens[0]
    if kind == "CONDITIONAL":
        return GateOp("CONDITIONAL", cbit=int(tokens[1]), inner=parse_op(" ".join(tokens[2:])))
    cbit = None
    if "->" in tokens:
        i = tokens.index("->")
        cbit = int(tokens[i + 1])
        tokens = tokens[:i]
    rest = tokens[1:]
    qubits = []
    while rest and _INT.match(rest[0]):
        qubits.append(int(rest.pop(0)))
    values = [float(t) for t in rest]
    if kind == "UNITARY":
        dim = 1 << len(qubits)
        # assign parts separately so signed zeros survive the round trip
        m = np.empty(dim * dim, dtype=complex)
        m.real, m.imag = values[0::2], values[1::2]
        m = m.reshape(dim, dim)
        return GateOp(kind, tuple(qubits), matrix=m)
    return GateOp(kind, tuple(qubits), tuple(values), cbit=cbit)


@dataclass
class Circuit:
    num_qubits: int
    num_classical: int = 0
    ops: list[GateOp] = field(default_factory=list)
    noise: GateNoiseParams | None = None
    # qubits whose measurements suffer readout error (None = all)
    noisy_readout_qubits: tuple[int, ...] | None = None
    metadata: dict = field(default_factory=dict)

    # builders -------------------------------------------------------------

    def append(self, op: GateOp) -> "Circuit":
        self.ops.append(op)
        return self

    def x(self, q):
        return self.append(GateOp("X", (q,)))

    def z(self, q):
        return self.append(GateOp("Z", (q,)))

    def h(self, q):
        return self.append(GateOp("H", (q,)))

    def rx(self, theta, q):
        return self.append(GateOp("RX", (q,), (theta,)))

    def ry(self, theta, q):
        return self.append(GateOp("RY", (q,), (theta,)))

    def cnot(self, control, target):
        return self.append(GateOp("CNOT", (control, target)))

    def cu(self, theta, phi, lam, gamma, control, target):
        return self.append(GateOp("CU", (control, target), (theta, phi, lam, gamma)))

    def ch(self, control, target):
        """Controlled-H from one CNOT: H = RY(-pi/4) X RY(pi/4)."""
        self.ry(np.pi / 4, target)
        self.cnot(control, target)
        return self.ry(-np.pi / 4, target)

    def unitary(self, matrix, qubits):
        return self.append(GateOp("UNITARY", tuple(qubits), matrix=matrix))

    def measure(self, q, c):
        return self.append(GateOp("MEASURE", (q,), cbit=c))

    def barrier(self):
        return self.append(GateOp("BARRIER"))

    def c_if(self, cbit, op: GateOp):
        return self.append(GateOp("CONDITIONAL", cbit=cbit, inner=op))

    def damp(self, r, q):
        return self.append(GateOp("AD", (q,), (r,)))

    def compose(self, other: "Circuit", qubits: Sequence[int], clbits: Sequence[int] = ()) -> "Circuit":
        """Append ``other`` with its qubit ``i`` mapped to ``qubits[i]``."""
        qmap, cmap = list(qubits), list(clbits)

        def remap(op: GateOp) -> GateOp:
            inner = remap(op.inner) if op.inner is not None else None
            return GateOp(
                op.kind,
                tuple(qmap[q] for q in op.qubits),
                op.params,
                cbit=cmap[op.cbit] if op.cbit is not None else None,
                inner=inner,
                matrix=op.matrix,
            )

        for op in other.ops:
            self.append(remap(op))
        return self

    # inspection -----------------------------------------------------------

    @property
    def cnot_count(self) -> int:
        def is_cnot(op):
            return op.kind == "CNOT" or (op.kind == "CONDITIONAL" and is_cnot(op.inner))

        return sum(is_cnot(op) for op in self.ops)

    @property
    def has_noise(self) -> bool:
        return self.noise is not None or any(op.kind == "AD" for op in self.ops)

    @property
    def has_measurement(self) -> bool:
        return any(op.kind == "MEASURE" for op in self.ops)

    def validate(self) -> None:
        written: set[int] = set()
        for op in self.ops:
            for o in (op, op.inner) if op.inner is not None else (op,):
                for q in o.qubits:
                    if not 0 <= q < self.num_qubits:
                        raise ValueError(f"{o.kind}: qubit {q} out of range")
            if op.cbit is not None and not 0 <= op.cbit < self.num_classical:
                raise ValueError(f"{op.kind}: classical bit {op.cbit} out of range")
            if op.kind == "MEASURE":
                written.add(op.cbit)
            elif op.kind == "CONDITIONAL" and op.cbit not in written:
                raise ValueError(f"conditional on bit {op.cbit} before it is measured")

    def dumps(self) -> str:
        lines = [f"QUBITS {self.num_qubits}", f"CLBITS {self.num_classical}"]
        lines += [op.to_line() for op in self.ops]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Circuit":
        nq, nc, ops = None, 0, []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head = line.split()[0]
            if head == "QUBITS":
                nq = int(line.split()[1])
            elif head == "CLBITS":
                nc = int(line.split()[1])
            else:
                ops.append(parse_op(line))
        if nq is None:
            raise ValueError("missing QUBITS line")
        c = cls(nq, nc, ops)
        c.validate()
        return c


# ------------------------------------------------------------------ builders


def w_prep_circuit() -> Circuit:
    """(|100> + |010> + sqrt2|001>)/2 from |000>, using three CNOTs."""
    c = Circuit(3)
    c.ry(np.pi / 2, 2)  # |001> gets weight 1/2
    c.x(0)
    c.cnot(2, 0)  # (|100> + |001>)/sqrt2
    c.ch(0, 1)
    c.cnot(1, 0)  # split the |100> weight onto |010>
    return c


def basis_change_circuit(decompose: bool = False) -> Circuit:
    """Maps eta+, eta-, xi+, xi- onto |000>, |001>, |010>, |011>.

    The default is a single UNITARY gate built from :func:`charlie_basis`.
    ``decompose=True`` gives an equivalent CNOT/one-qubit network (five
    CNOTs) that agrees on the four named vectors; the complement is mapped
    onto |1xx> but not necessarily onto the same states.
    """
    c = Circuit(3)
    if not decompose:
        c.unitary(charlie_basis().matrix(), (0, 1, 2))
        return c
    a, b, d = 0, 1, 2
    c.cnot(b, d)
    c.ch(d, b)
    c.x(d)
    c.cnot(d, a)
    c.h(d)
    c.cnot(a, b)
    c.cnot(b, a)
    return c


def weak_measurement_angle(q: float) -> float:
    """CU angle for strength ``q``; ``q = 1`` gives the projective limit pi."""
    if not 0 <= q <= 1:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    return float(2 * np.arctan2(np.sqrt(q), np.sqrt(1 - q)))


def weak_measurement_gadget(q: float) -> Circuit:
    """Data qubit 0, ancilla 1, ancilla result in classical bit 0.

    RX(pi) on the data qubit sandwiches a controlled rotation onto the
    ancilla, so that ancilla outcome 0 applies diag(sqrt(1-q), 1) to the data
    (up to a global sign) and outcome 1 applies diag(sqrt(q), 0).
    """
    c = Circuit(2, 1)
    c.rx(np.pi, 0)
    c.cu(weak_measurement_angle(q), 0.0, 0.0, 0.0, 0, 1)
    c.rx(np.pi, 0)
    c.measure(1, 0)
    return c


def gadget_operators(q: float) -> tuple[np.ndarray, np.ndarray]:
    """Effective data-qubit operators for ancilla outcomes 0 and 1."""
    u = np.eye(4, dtype=complex)
    for op in weak_measurement_gadget(q).ops:
        if op.kind in UNITARY_KINDS:
            u = embed(op.unitary(), op.targets, 2) @ u
    # index = 2*data + ancilla; ancilla starts in |0>
    k0 = u[0::2, 0::2]
    k1 = u[1::2, 0::2]
    return k0, k1


CHARLIE_QUBITS = (2, 3, 4)
SHARED_QUBITS = (0, 1, 5)
ANCILLA_FOR = {0: 6, 1: 7, 5: 8}


def swap_circuit(
    noise: GateNoiseParams | None = None,
    damping: float | None = None,
    purify_q: float | None = None,
    decompose: bool = False,
    measure_output: bool = False,
) -> Circuit:
    """Full swapping circuit on qubits 0..5 (plus ancillas 6..8 when purifying).

    Classical bits: 0..2 hold Charlie's result (qubits 2, 3, 4); 3..5 the
    ancilla results when purifying; the output measurements of qubits
    0, 1, 5 (``measure_output``) come last.  Bits 1, 2 of Charlie's result
    encode eta+ 00, eta- 01, xi+ 10, xi- 11.
    """
    n = 9 if purify_q is not None else 6
    nc = 3 + (3 if purify_q is not None else 0) + (3 if measure_output else 0)
    c = Circuit(n, nc, noise=noise, noisy_readout_qubits=CHARLIE_QUBITS)
    prep = w_prep_circuit()
    c.compose(prep, (0, 1, 2)).compose(prep, (3, 4, 5)).barrier()
    if damping is not None:
        for q in CHARLIE_QUBITS:
            c.damp(damping, q)
        c.barrier()
    c.compose(basis_change_circuit(decompose), CHARLIE_QUBITS).barrier()
    for i, q in enumerate(CHARLIE_QUBITS):
        c.measure(q, i)
    c.barrier()
    c.c_if(2, GateOp("Z", (5,)))
    if purify_q is None:
        c.c_if(1, GateOp("X", (5,)))
    next_bit = 3
    if purify_q is not None:
        c.barrier()
        gadget = weak_measurement_gadget(purify_q)
        for i, q in enumerate(SHARED_QUBITS):
            c.compose(gadget, (q, ANCILLA_FOR[q]), (next_bit + i,))
        next_bit += 3
    if measure_output:
        for i, q in enumerate(SHARED_QUBITS):
            c.measure(q, next_bit + i)
    c.metadata["cnot_count"] = c.cnot_count
    c.validate()
    return c


# ----------------------------------------------------------------- executors


def _apply_unitary_op(vec_or_rho: np.ndarray, op: GateOp, density: bool) -> np.ndarray:
    if density:
        return conjugate(vec_or_rho, op.unitary(), op.targets)
    return apply_unitary_vector(vec_or_rho, op.unitary(), op.targets)


def run_statevector(c: Circuit, initial: StateVector | None = None) -> StateVector:
    """Exact final state of a measurement-free, noise-free circuit."""
    if c.has_noise:
        raise UnsupportedModeError("noise requires the density-matrix executor")
    if c.has_measurement:
        raise UnsupportedModeError("circuit measures; use statevector_branches")
    (bits, p, state), = statevector_branches(c, initial)
    return state


def statevector_branches(c: Circuit, initial: StateVector | None = None) -> list[tuple[str, float, StateVector]]:
    """Enumerate every classical record of a noise-free circuit with its exact
    probability and normalised post-measurement state (no sampling)."""
    if c.has_noise:
        raise UnsupportedModeError("noise requires the density-matrix executor")
    psi = np.zeros(1 << c.num_qubits, dtype=complex)
    if initial is None:
        psi[0] = 1.0
    else:
        psi = initial.amplitudes.copy()
    branches = [([0] * c.num_classical, psi)]
    for op in c.ops:
        nxt = []
        for bits, v in branches:
            if op.kind == "BARRIER":
                nxt.append((bits, v))
            elif op.kind == "MEASURE":
                (q,), cb = op.qubits, op.cbit
                for outcome, proj in ((0, np.diag([1, 0])), (1, np.diag([0, 1]))):
                    w = apply_unitary_vector(v, proj, [q])
                    if np.vdot(w, w).real > PROB_FLOOR:
                        nb = list(bits)
                        nb[cb] = outcome
                        nxt.append((nb, w))
            elif op.kind == "CONDITIONAL":
                nxt.append((bits, _apply_unitary_op(v, op.inner, False) if bits[op.cbit] else v))
            else:
                nxt.append((bits, _apply_unitary_op(v, op, False)))
        branches = nxt
    out = []
    for bits, v in branches:
        p = float(np.vdot(v, v).real)
        out.append(("".join(map(str, bits)), p, StateVector(v / np.sqrt(p))))
    return sorted(out, key=lambda t: t[0])


def run_density(
    c: Circuit,
    noise: GateNoiseParams | None = None,
    postselect: dict[int, int] | None = None,
    initial: DensityMatrix | None = None,
) -> list[tuple[str, Branch]]:
    """Exact enumeration of classical records with their probabilities.

    ``noise`` (or ``c.noise``) routes every CNOT through the depolarising
    model and every measurement of ``c.noisy_readout_qubits`` through the
    readout-flip model.  ``postselect`` maps classical bits to required
    values; inconsistent branches are dropped as soon as the bit is written,
    so the returned probabilities are absolute, not conditional.
    """
    noise = noise or c.noise
    y2 = noise.y2 if noise else 1.0
    eta = noise.eta_m if noise else 1.0
    noisy_q = c.noisy_readout_qubits
    postselect = postselect or {}
    if initial is None:
        rho = np.zeros((1 << c.num_qubits,) * 2, dtype=complex)
        rho[0, 0] = 1.0
    else:
        rho = initial.matrix.copy()
    branches = [((0,) * c.num_classical, rho)]

    def gate(m: np.ndarray, op: GateOp) -> np.ndarray:
        if op.kind == "CNOT" and y2 < 1.0:
            return noisy_cnot_apply(DensityMatrix(m), *op.qubits, y2).matrix
        if op.kind == "AD":
            ch = amplitude_damping(op.params[0])
            return sum(conjugate(m, k, op.qubits) for k in ch.operators)
        return conjugate(m, op.unitary(), op.targets)

    for op in c.ops:
        if op.kind == "BARRIER":
            continue
        nxt = []
        for bits, m in branches:
            if op.kind == "MEASURE":
                (q,), cb = op.qubits, op.cbit
                e = eta if noisy_q is None or q in noisy_q else 1.0
                for outcome, part in enumerate(readout_split(m, q, e)):
                    if postselect.get(cb, outcome) != outcome:
                        continue
                    if np.trace(part).real > PROB_FLOOR:
                        nb = list(bits)
                        nb[cb] = outcome
                        nxt.append((tuple(nb), part))
            elif op.kind == "CONDITIONAL":
                nxt.append((bits, gate(m, op.inner) if bits[op.cbit] else m))
            else:
                nxt.append((bits, gate(m, op)))
        branches = nxt
    out = [("".join(map(str, bits)), Branch.from_unnormalized(m)) for bits, m in branches]
    return sorted(out, key=lambda t: t[0])


def reduce_branches(
    results: Iterable[tuple[str, Branch]],
    keep: Sequence[int],
    select: Callable[[str], bool] = lambda bits: True,
) -> Branch:
    """Mixture of the selected branches, reduced to ``keep``.

    The returned probability is the total probability of the selected
    records; the state is conditional on them.
    """
    total, acc = 0.0, None
    for bits, b in results:
        if b.empty or not select(bits):
            continue
        red = partial_trace(b.state, keep).matrix * b.probability
        acc = red if acc is None else acc + red
        total += b.probability
    if acc is None:
        return Branch(None, 0.0)
    return Branch(DensityMatrix(acc / total), total)


def is_eta(bits: str) -> bool:
    """Charlie reported eta+ or eta- (bits 0 and 1 both zero)."""
    return bits[0] == "0" and bits[1] == "0"


def gate_noise_fidelity(y2: float, eta_m: float, decompose: bool = True) -> float:
    """Fidelity to |W> of Bob's and Alice's state averaged over all records."""
    res = run_density(swap_circuit(GateNoiseParams(y2, eta_m), decompose=decompose))
    return pure_fidelity(w_state(), reduce_branches(res, SHARED_QUBITS).state)


@dataclass(frozen=True)
class ShotResult:
    counts: dict[str, int]
    shots: int
    seed: int
    algorithm: str = PRNG_ALGORITHM

    def frequency(self, select: Callable[[str], bool]) -> float:
        return sum(n for b, n in self.counts.items() if select(b)) / self.shots


def sample_shots(c: Circuit, shots: int, seed: int, noise: GateNoiseParams | None = None) -> ShotResult:
    """Draw ``shots`` classical records from the exact distribution."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    results = run_density(c, noise)
    keys = [bits for bits, _ in results]
    probs = np.array([b.probability for _, b in results])
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.multinomial(shots, probs / probs.sum())
    counts = {k: int(n) for k, n in zip(keys, draws) if n}
    return ShotResult(counts, shots, seed)
