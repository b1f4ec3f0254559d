# %% [markdown]
# # Imperfect CNOTs and readout
#
# Gate noise replaces both CNOT qubits by the maximally mixed state with
# probability 1 - y2. Readout reports the wrong bit with probability 1 - eta.
# Fidelity is averaged over all of Charlie's records after Bob's correction.

# %%
import matplotlib.pyplot as plt

from wswap import circuit as qc
from wswap.cli import gate_noise_row

# %%
grid = [1.0, 0.98, 0.96, 0.94, 0.92, 0.9]
for decompose in (False, True):
    n = qc.swap_circuit(decompose=decompose).cnot_count
    cnot = [gate_noise_row(y, 1.0, decompose)["fidelity"] for y in grid]
    read = [gate_noise_row(1.0, e, decompose)["fidelity"] for e in grid]
    print(f"{n} CNOTs")
    print("  CNOT error:   ", [round(f, 4) for f in cnot])
    print("  readout error:", [round(f, 4) for f in read])

# %% [markdown]
# Only two of Charlie's bits drive the correction, so readout fidelity is
# exactly eta^2. Every CNOT in the network costs a bit under (1 - y2), so
# with this noise model CNOT error dominates for any circuit that has to
# prepare two W states.

# %%
plt.plot(grid, [gate_noise_row(y, 1.0)["fidelity"] for y in grid], "o-", label="CNOT error (y2)")
plt.plot(grid, [gate_noise_row(1.0, e)["fidelity"] for e in grid], "s-", label="readout error (eta)")
plt.xlabel("y2 or eta")
plt.ylabel("fidelity")
plt.gca().invert_xaxis()
plt.legend()
plt.savefig("gate_noise.png", dpi=120)
