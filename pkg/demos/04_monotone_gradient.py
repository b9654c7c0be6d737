# %% [markdown]
# # Chains with a monotone observable
#
# If a chain only moves to states where an observable w is larger, its
# forward equation is a gradient flow with a state-dependent symmetric
# matrix K(p). This holds even when the generator is not diagonalisable.

# %%
import numpy as np

from recoflow.dynamics import RecombinationRates
from recoflow.partitioning import build_generator, eigen_multiplicities, exact_rank, jordan_example, monotone_gradient_matrix

q, w = jordan_example()
print("generator\n", q)
print("observable", w)
alg, geo = eigen_multiplicities(q.T, -2)
print(f"eigenvalue -2: algebraic {alg}, geometric {geo}, rank(Q^T + 2I) = {exact_rank(q.T + 2 * np.eye(4))}")

# %%
p = np.array([0.1, 0.2, 0.3, 0.4])
k = monotone_gradient_matrix(q, w, p)
print(k)
print("K(p) w - Q^T p =", k @ w - q.T @ p)
print("eigenvalues of K(p)", np.linalg.eigvalsh(k).round(6))

# %% [markdown]
# The partitioning process with the block count as observable.

# %%
gen = build_generator(4, RecombinationRates.random(4, 2))
w = gen.block_counts()
p = np.random.default_rng(5).dirichlet(np.ones(len(w)))
print("max |K(p) w - Q^T p| =", np.max(np.abs(monotone_gradient_matrix(gen, w, p) @ w - gen.Q.T @ p)))
