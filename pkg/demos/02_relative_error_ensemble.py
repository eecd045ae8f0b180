# %% [markdown]
# # Ensemble relative error
#
# Average ||e_t|| / ||e_0|| over independent graphs and initial states. On a
# log axis the curve is a straight line: convergence is exponential.

# %%
import numpy as np

from evoconsensus import SimConfig, default_fit_window, emit_csv, run_ensemble
from evoconsensus.metrics import log_linear_fit

# The full-size run uses trials=1000; 20 is enough to see the shape.
cfg = SimConfig(n=1000, p1=0.2, p2=0.2, b=5, c=4, delta=1e-3, steps=100, trials=20,
                record_states=False)
report = run_ensemble(cfg)
curve = report.curve
emit_csv(report, "relative_error.csv")

# %%
lo, hi = default_fit_window(curve)
mask = (curve.t >= lo) & (curve.t <= hi)
slope, _, r2 = log_linear_fit(curve.t[mask], curve.mean_relerr[mask])
print(f"smallest lambda2 over trials: {report.lambda2_min:.2f}")
print(f"relerr decay rate: {-slope:.2f}, R^2 of log-linear fit: {r2:.5f}")
print(f"mean V decay rate: {report.decay_rate:.2f}  (bound holds: {report.bound_ok})")
for r in range(0, len(curve), 20):
    print(f"t={curve.t[r]:.3f}  mean relerr={curve.mean_relerr[r]:.3e}")

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(curve.t, curve.mean_relerr)
    ax.set_xlabel("t")
    ax.set_ylabel("mean ||e_t|| / ||e_0||")
    fig.tight_layout()
    fig.savefig("relative_error.png", dpi=150)
