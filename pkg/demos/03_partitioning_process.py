# %% [markdown]
# # The partitioning process and its duality
#
# Looking backwards, the sites of one individual split into blocks that come
# from different ancestors. This is a Markov chain on set partitions. Averaging
# R_{Sigma_t}(omega0) over its paths recovers the solution omega_t.

# %%
import numpy as np

from recoflow.dynamics import RecombinationRates, integrate
from recoflow.partitioning import (
    build_generator,
    integrate_master,
    mc_dual_estimate,
    occupancy,
    reconstruct,
    simulate_paths,
)
from recoflow.partitions import coarsest
from recoflow.typespace import TypeSpace

rates = RecombinationRates.two_parent_three_locus(0.5, 1.0, 1.5)
gen = build_generator(3, rates)
print([p.label for p in gen.states])
print(gen.Q)

# %%
master = integrate_master(gen, t_end=1.0, dt=1e-3)
print("b_1 =", master.final.round(5))
print("stay at the single block:", master.final[0], np.exp(-3.0))

# %%
paths = simulate_paths(gen, coarsest(3), 1.0, 10000, seed=7)
print("empirical occupancy", occupancy(paths, 1.0, gen.states).round(3))
print(paths[0])

# %%
sp = TypeSpace.binary(3)
omega0 = np.random.default_rng(1).dirichlet(np.ones(8))
direct = integrate(sp, omega0, rates, 1.0, 1e-3).final
mean, err = mc_dual_estimate(sp, paths, omega0, 1.0, return_stderr=True)
print("master vs direct", np.max(np.abs(reconstruct(sp, omega0, master.final) - direct)))
print("Monte Carlo in std errors", np.round(np.abs(mean - direct) / err, 2))
