# %% [markdown]
# # Sampled topologies average to the weighted Laplacian
#
# Each step every feasible link is kept or created with a probability set by
# the endpoints' coordination levels. Averaging many sampled 0/1 Laplacians
# recovers the weighted Laplacian W, whose link weights never drop below 1/2.

# %%
import numpy as np

from evoconsensus import (
    GameParams,
    fiedler_value,
    generate_feasible_graph,
    init_active_sets,
    laplacian_of,
    sample_decisions,
    weight_create,
    weighted_laplacian,
)

params = GameParams(b=5, c=4)
s = np.linspace(0, 2, 5)
print("x_i + x_j :", s)
print("weight    :", np.round(weight_create(s / 2, s / 2, params), 6))

# %%
rng = np.random.default_rng(0)
g = generate_feasible_graph(10, 0.5, rng)
state = init_active_sets(g, 0.5, rng)
x = rng.random(10)
W = weighted_laplacian(g, state, x, params)

N = 20_000
mean_L = sum(laplacian_of(sample_decisions(g, state, x, params, rng)) for _ in range(N)) / N
print(f"max |mean(L) - W| over {N} samples: {np.abs(mean_L - W).max():.4f}")

# %%
print(f"lambda2(G')  = {fiedler_value(g.laplacian()):.4f}")
print(f"lambda2(W)   = {fiedler_value(W):.4f}  (at least half of lambda2(G'))")
