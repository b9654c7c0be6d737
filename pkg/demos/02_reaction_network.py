# %% [markdown]
# # Recombination as a reversible reaction network
#
# Every cut pattern and ordered tuple of parents becomes a mass-action
# reaction. The reactions come in reverse pairs with equal constants, and the
# flow is a gradient flow of the free energy.

# %%
import numpy as np

from recoflow.distributions import grad_free_energy
from recoflow.dynamics import RecombinationRates, reco_rhs
from recoflow.gradient import onsager_matrix, psd_check, two_locus_reference
from recoflow.networks import aggregate, build_type_network, mass_action_rhs, pair_reactions
from recoflow.typespace import TypeSpace

sp = TypeSpace.binary(2)
net = build_type_network(sp, RecombinationRates(2, {"1|2": 1.0}))
print(pair_reactions(net).stats(net))
for (subs, prods), kappa in aggregate(net).items():
    if subs != prods:
        print(" + ".join(net.labels[i] for i in subs), "->", " + ".join(net.labels[i] for i in prods), kappa)

# %% [markdown]
# Three loci with a seeded rate on every partition.

# %%
sp3 = TypeSpace.binary(3)
rates = RecombinationRates.random(3, 1)
net3 = build_type_network(sp3, rates)
print(pair_reactions(net3).stats(net3))
c = np.random.default_rng(0).dirichlet(np.ones(8))
print("mass action vs recombination", np.max(np.abs(mass_action_rhs(net3, c) - reco_rhs(sp3, c, rates))))

# %%
m = onsager_matrix(net3, c)
print("C grad F vs recombination", np.max(np.abs(m @ grad_free_energy(c) - reco_rhs(sp3, c, rates))))
ok, qf, ev = psd_check(m, report=True)
print(f"psd {ok}: min quadratic form {qf:.3e}, min eigenvalue {ev:.3e}")
print("row sums", np.abs(m.sum(axis=1)).max())

# %% [markdown]
# For two loci the matrix has rank one and a closed form.

# %%
nu = np.array([0.4, 0.1, 0.2, 0.3])
print(onsager_matrix(net, nu))
print("equal to closed form:", np.array_equal(onsager_matrix(net, nu), two_locus_reference(nu, 1.0)))
