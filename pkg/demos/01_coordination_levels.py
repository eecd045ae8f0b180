# %% [markdown]
# # Coordination levels of a single trial
#
# One feasible graph, one random initial state, agents creating and dropping
# links as they go. Every coordination level is pulled to the initial average.

# %%
import numpy as np

from evoconsensus import SimConfig, run_trial

cfg = SimConfig(n=1000, p1=0.2, p2=0.2, b=5, c=4, steps=150, record_states=True)
tr = run_trial(cfg, trial_index=0)
print(f"feasible edges: {tr.graph.m}, step size: {cfg.dt}")
print(f"initial average: {tr.average:.6f}")

# %%
# The spread shrinks geometrically while the sum stays put.
for r in range(0, len(tr.k), 25):
    x = tr.states[r]
    print(f"t={tr.t[r]:.3f}  min={x.min():.6f}  max={x.max():.6f}  "
          f"active links={tr.active_count[r]:6d}  sum drift={tr.total[r] - tr.total[0]:+.1e}")

# %%
# Optional figure, if matplotlib is installed.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(tr.t, tr.states, lw=0.3, color="tab:blue", alpha=0.3)
    ax.axhline(tr.average, color="k", lw=1)
    ax.set_xlabel("t")
    ax.set_ylabel("coordination level")
    fig.tight_layout()
    fig.savefig("coordination_levels.png", dpi=150)
    print("wrote coordination_levels.png")
