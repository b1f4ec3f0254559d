# %% [markdown]
# # Gate-level circuit and seeded sampling
#
# The swap is also available as an explicit circuit: W preparation, damping,
# Charlie's basis change, measurement, classically controlled corrections and
# optional weak-measurement gadgets on three ancillas.

# %%
import numpy as np

from wswap import circuit as qc
from wswap.protocol import pipeline_state
from wswap.qlinalg import trace_distance

# %%
c = qc.swap_circuit(damping=0.3, purify_q=0.64)
print(c.dumps())

# %% [markdown]
# Post-selecting on the eta records (bits 0 and 1 equal 0) and on all three
# ancillas reading 0 recovers the matrix-level state.

# %%
res = qc.run_density(c, postselect={0: 0, 1: 0, 3: 0, 4: 0, 5: 0})
kept = qc.reduce_branches(res, qc.SHARED_QUBITS)
print("probability:", kept.probability)
print("trace distance:", trace_distance(kept.state, pipeline_state(0.3, 0.64)))

# %% [markdown]
# The weak-measurement gadget is RX(pi), a controlled rotation onto the
# ancilla and RX(pi) again. Its ancilla-0 operator equals diag(sqrt(1-q), 1)
# up to a global sign.

# %%
k0, k1 = qc.gadget_operators(0.64)
print(np.round(k0, 6))
print(np.round(k1, 6))

# %%
shots = qc.sample_shots(qc.swap_circuit(measure_output=True), 100_000, seed=7)
print(shots.algorithm, "seed", shots.seed)
print("|001> on (0,1,5):", shots.frequency(lambda b: b[3:6] == "001"))
again = qc.sample_shots(qc.swap_circuit(measure_output=True), 100_000, seed=7)
print("identical counts:", again.counts == shots.counts)
