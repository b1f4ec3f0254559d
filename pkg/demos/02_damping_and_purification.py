# %% [markdown]
# # Amplitude damping and weak-measurement purification
#
# Each resource W state passes through amplitude damping with decay
# probability r on every qubit. Only the eta outcomes survive as usable
# branches; their fidelity to |W> drops to 1/(1+r). A weak measurement
# M = diag(sqrt(1-q), 1) on each output qubit, kept when all three report 0,
# pushes the fidelity back up at the cost of success probability.

# %%
import matplotlib.pyplot as plt
import numpy as np

from wswap.protocol import damped_swap, full_pipeline, oracle, pipeline_state

# %%
rs = np.linspace(0, 0.95, 20)
fid = [damped_swap(r).fidelity("eta+") for r in rs]
g = [damped_swap(r).probability("eta+") for r in rs]
print("max |F - 1/(1+r)| =", max(abs(f - 1 / (1 + r)) for f, r in zip(fid, rs)))
print("max |g - (1-r^2)/4| =", max(abs(x - (1 - r * r) / 4) for x, r in zip(g, rs)))

# %%
fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
qs = np.linspace(0, 0.95, 20)
for r in (0.1, 0.3, 0.5, 0.8):
    ax[0].plot(qs, [full_pipeline(r, q).fidelity for q in qs], label=f"r={r}")
    ax[1].plot(qs, [full_pipeline(r, q).probability for q in qs], label=f"r={r}")
ax[0].set_xlabel("q")
ax[0].set_ylabel("fidelity")
ax[1].set_xlabel("q")
ax[1].set_ylabel("total success probability")
ax[0].legend()
fig.tight_layout()
fig.savefig("purification_tradeoff.png", dpi=120)

# %% [markdown]
# At r = 0.3 and q = 0.64 the kept state is mostly |W> with a residue on |000>.

# %%
rho = pipeline_state(0.3, 0.64)
print({f"{i:03b}": round(float(p), 4) for i, p in enumerate(rho.probabilities()) if p > 1e-12})
rep = oracle(0.3, 0.64)
print(f"F={rep.fid_wm:.5f}  p_wm={rep.p_wm:.5f}  P_total={rep.p_total_composed:.5f}")

# %% [markdown]
# The total success probability is 2 * g * p_wm. The polynomial with a
# (1 - q^2) factor agrees with it only at q = 0.

# %%
for q in (0.0, 0.25, 0.5):
    o = oracle(0.5, q)
    print(f"q={q}: composed={o.p_total_composed:.6f} (1-q^2) form={o.p_total_printed:.6f}")
