# %% [markdown]
# # Ideal W-state swap
#
# Two copies of |W> = (|100> + |010> + sqrt2 |001>)/2 sit on qubits 0-2 and 3-5.
# Charlie holds qubits 2, 3 and 4, measures them in the eta/xi basis, and Bob
# fixes qubit 5 with a Pauli picked by the two classical bits.

# %%
import numpy as np

from wswap import charlie_basis, ideal_swap, w_state

# %%
basis = charlie_basis()
for label, v in zip(basis.labels, basis.outcomes):
    nz = {f"{i:03b}": np.round(a, 4) for i, a in enumerate(v.amplitudes) if abs(a) > 1e-12}
    print(label, nz)

# the eight vectors form an orthonormal basis
print("max |Gram - I| =", np.max(np.abs(basis.gram() - np.eye(8))))

# %%
swap = ideal_swap()
for label in ("eta+", "eta-", "xi+", "xi-"):
    e = swap[label]
    print(f"{label:5s} bits={e.outcome.classical_bits} correction={e.outcome.correction:2s} "
          f"p={e.branch.probability:.4f} F={e.fidelity:.6f}")

# %% [markdown]
# Every outcome is equally likely and every corrected state is |W> again, so
# the swap never fails. The output qubits (0, 1, 5) show the W weights.

# %%
p = swap.average_state().probabilities()
print({f"{i:03b}": round(float(x), 6) for i, x in enumerate(p) if x > 1e-12})
print("overlap with |W>:", abs(w_state().inner(w_state())) ** 2)
