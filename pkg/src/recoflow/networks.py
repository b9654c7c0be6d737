"""Reaction networks generated by recombination.

Two networks are built.  On the type level, every partition C with positive
rate and every ordered |C|-tuple of parent types gives one reaction: the
parents are cut along the blocks of C and product j takes block i from
parent i + j - 1 (indices mod |C|).  On the partition level the same
construction acts on partitions of the sites, with fragments replaced by
induced partitions.  Both fire with constant rho(C) / |C|.

Reactions are kept per ordered tuple, never merged, so sums over the network
match sums over tuples term by term.  Void reactions (products equal to
substrates as multisets) are flagged and skipped when evaluating rates.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .distributions import TUPLE_WORK_BOUND, check_distribution
from .dynamics import RecombinationRates
from .errors import ArityError, DimensionError, OrderError, ResourceError, ReversibilityError
from .partitions import (
    Partition,
    disjoint_union,
    enumerate_partitions,
    is_finer,
    partition_index,
    restrict,
)
from .typespace import TypeSpace


def cyclic_parent(block: int, product: int, m: int) -> int:
    """0-based parent feeding ``block`` of ``product`` (both 0-based)."""
    return (block + product) % m


@dataclass(frozen=True)
class Reaction:
    """Ordered substrate tuple -> ordered product tuple with constant kappa."""

    substrates: tuple
    products: tuple
    kappa: float
    origin: Partition | None = None

    def __post_init__(self):
        if len(self.substrates) != len(self.products):
            raise ArityError("substrate and product complexes differ in size")
        if not self.kappa > 0:
            raise ValueError("reaction constant must be positive")

    @property
    def substrate_complex(self) -> tuple:
        return tuple(sorted(self.substrates))

    @property
    def product_complex(self) -> tuple:
        return tuple(sorted(self.products))

    @property
    def void(self) -> bool:
        return self.substrate_complex == self.product_complex


@dataclass
class Pairing:
    pairs: list
    fixed_points: list
    void: list

    def stats(self, net) -> dict:
        nonvoid = sum(1 for f, _ in self.pairs if not net.reactions[f].void)
        return {
            "reactions": len(net.reactions),
            "pairs": len(self.pairs),
            "nonvoid_pairs": nonvoid,
            "fixed_points": len(self.fixed_points),
            "void_reactions": len(self.void),
            "unpaired_nonvoid": 0,
        }


@dataclass
class ReactionNetwork:
    """Reactions over species 0..carrier_size-1 (type or partition indices)."""

    kind: str
    carrier_size: int
    labels: list
    reactions: list
    pairing: Pairing | None = field(default=None, repr=False)

    @cached_property
    def _compiled(self):
        groups = defaultdict(lambda: ([], [], []))
        for r in self.reactions:
            if r.void:
                continue
            s, p, k = groups[len(r.substrates)]
            s.append(r.substrates)
            p.append(r.products)
            k.append(r.kappa)
        return [(np.array(s), np.array(p), np.array(k)) for _, (s, p, k) in sorted(groups.items())]

    def nonvoid(self):
        return [i for i, r in enumerate(self.reactions) if not r.void]


def _check_work(work):
    if work > TUPLE_WORK_BOUND:
        raise ResourceError(f"{work} reactions exceed the bound {TUPLE_WORK_BOUND}")


def type_reaction(space: TypeSpace, partition: Partition, parents, rate: float) -> Reaction:
    """Reaction for cut pattern ``partition`` and an ordered parent tuple."""
    m = len(partition)
    if len(parents) != m:
        raise ArityError(f"{len(parents)} parents for a partition with {m} blocks")
    parents = [space.check(x) for x in parents]
    products = []
    for j in range(m):
        frags = [space.project(parents[cyclic_parent(i, j, m)], block) for i, block in enumerate(partition.blocks)]
        products.append(space.join(frags))
    return Reaction(tuple(parents), tuple(products), rate / m, partition)


def phi_involution(space: TypeSpace, partition: Partition, parents) -> tuple:
    """Products of the reaction for ``parents``, listed in reverse order."""
    return tuple(reversed(type_reaction(space, partition, parents, 1.0).products))


def _type_products(space, partition, tuples):
    m = len(partition)
    letters = space.types
    out = np.empty_like(tuples)
    for j in range(m):
        child = np.empty((len(tuples), space.n), dtype=int)
        for i, block in enumerate(partition.blocks):
            cols = [s - 1 for s in block]
            child[:, cols] = letters[tuples[:, cyclic_parent(i, j, m)]][:, cols]
        out[:, j] = np.ravel_multi_index(child.T, space.shape)
    return out


def build_type_network(space: TypeSpace, rates: RecombinationRates) -> ReactionNetwork:
    """One reaction per supported partition and ordered parent tuple."""
    if rates.n != space.n:
        raise DimensionError(f"rates on {rates.n} sites for {space.n}-site types")
    support = rates.items()
    _check_work(sum(space.size ** len(p) for p, _ in support))
    reactions = []
    for p, rho in support:
        m = len(p)
        tuples = np.indices((space.size,) * m).reshape(m, -1).T
        products = _type_products(space, p, tuples)
        kappa = rho / m
        for s, q in zip(tuples.tolist(), products.tolist()):
            reactions.append(Reaction(tuple(s), tuple(q), kappa, p))
    labels = [space.label(x) for x in space.types]
    return ReactionNetwork("type", space.size, labels, reactions)


def pair_reactions(net: ReactionNetwork) -> Pairing:
    """Split the reactions into phi-orbits: forward/backward pairs and fixed points.

    The partner of a reaction is the one whose ordered substrates are its
    products reversed.  The forward member of a pair is the one with the
    lexicographically smaller substrate tuple.
    """
    if net.kind != "type":
        raise ValueError("pairing is defined for the type-level network only")
    lookup = {(r.origin, r.substrates): i for i, r in enumerate(net.reactions)}
    pairs, fixed, seen = [], [], set()
    for i, r in enumerate(net.reactions):
        if i in seen:
            continue
        j = lookup.get((r.origin, tuple(reversed(r.products))))
        if j is None:
            raise ReversibilityError(f"reaction {i} ({r.substrates} -> {r.products}) has no backward partner")
        if j == i:
            if not r.void:
                raise ReversibilityError(f"reaction {i} is a fixed point of phi but not void")
            fixed.append(i)
            seen.add(i)
            continue
        back = net.reactions[j]
        if back.product_complex != r.substrate_complex or back.substrate_complex != r.product_complex:
            raise ReversibilityError(f"reactions {i} and {j} do not swap complexes")
        if back.kappa != r.kappa:
            raise ReversibilityError(f"reactions {i} and {j} have different constants")
        if tuple(reversed(back.products)) != r.substrates:
            raise ReversibilityError(f"phi is not an involution on reaction {i}")
        f, b = (i, j) if r.substrates <= back.substrates else (j, i)
        pairs.append((f, b))
        seen.update((i, j))
    pairs.sort()
    net.pairing = Pairing(pairs, fixed, [i for i, r in enumerate(net.reactions) if r.void])
    return net.pairing


def mass_action_rhs(net: ReactionNetwork, c) -> np.ndarray:
    """sum over reactions of kappa * prod c(substrates) * (products - substrates)."""
    c = check_distribution(c, net.carrier_size, strict=False)
    out = np.zeros(net.carrier_size)
    for subs, prods, kappa in net._compiled:
        m = subs.shape[1]
        flux = kappa * np.prod(c[subs], axis=1)
        w = np.repeat(flux, m)
        out += np.bincount(prods.ravel(), weights=w, minlength=net.carrier_size)
        out -= np.bincount(subs.ravel(), weights=w, minlength=net.carrier_size)
    return out


def aggregate(net: ReactionNetwork) -> dict:
    """Total constant per (substrate complex, product complex), voids dropped."""
    out = defaultdict(float)
    for r in net.reactions:
        if not r.void:
            out[(r.substrate_complex, r.product_complex)] += r.kappa
    return dict(out)


# partition level


def partition_reaction(partition: Partition, tuple_: tuple, rate: float) -> Reaction:
    """Partition-level reaction: product j joins the restrictions A_{i+j-1}|_{C_i}."""
    m = len(partition)
    if len(tuple_) != m:
        raise ArityError(f"{len(tuple_)} partitions for a partition with {m} blocks")
    for a in tuple_:
        if a.n != partition.n:
            raise DimensionError(f"partition of {a.n} sites in a {partition.n}-site reaction")
    products = []
    for j in range(m):
        pieces = [restrict(tuple_[cyclic_parent(i, j, m)], block) for i, block in enumerate(partition.blocks)]
        products.append(disjoint_union(pieces))
    return Reaction(tuple(tuple_), tuple(products), rate / m, partition)


def build_partition_network(n: int, rates: RecombinationRates) -> ReactionNetwork:
    """One reaction per supported partition and ordered tuple of partitions."""
    if rates.n != n:
        raise DimensionError(f"rates on {rates.n} sites for a {n}-site network")
    parts = enumerate_partitions(n)
    index = partition_index(n)
    support = rates.items()
    _check_work(sum(len(parts) ** len(p) for p, _ in support))
    reactions = []
    for c, rho in support:
        m = len(c)
        restricted = [[restrict(a, block) for a in parts] for block in c.blocks]
        unions = {}
        for tup in itertools.product(range(len(parts)), repeat=m):
            prods = []
            for j in range(m):
                key = tuple(restricted[i][tup[cyclic_parent(i, j, m)]].blocks for i in range(m))
                if key not in unions:
                    pieces = [restricted[i][tup[cyclic_parent(i, j, m)]] for i in range(m)]
                    unions[key] = index[disjoint_union(pieces)]
                prods.append(unions[key])
            reactions.append(Reaction(tup, tuple(prods), rho / m, c))
    return ReactionNetwork("partition", len(parts), [p.label for p in parts], reactions)


def partition_mass_action_rhs(net: ReactionNetwork, a) -> np.ndarray:
    if net.kind != "partition":
        raise ValueError("expected a partition-level network")
    return mass_action_rhs(net, a)


def block_count_change(net: ReactionNetwork, reaction: Reaction) -> int:
    """Total block count of the products minus that of the substrates."""
    if net.kind != "partition":
        raise ValueError("block counts are defined for partition-level networks")
    parts = enumerate_partitions(reaction.origin.n)
    return sum(len(parts[i]) for i in reaction.products) - sum(len(parts[i]) for i in reaction.substrates)


class CoefficientSystem:
    """Nonlinear ODE for the coefficients a_t over partitions.

    da(A)/dt = -sum_B rho(B) a(A)
               + sum_{B >= A} rho(B) prod_i sum_{C : C|B_i = A|B_i} a(C).

    Evaluated directly from this formula, without reference to any network.
    Restriction classes are tabulated once so a call costs a few array ops.
    """

    def __init__(self, n: int, rates: RecombinationRates):
        if rates.n != n:
            raise DimensionError(f"rates on {rates.n} sites for a {n}-site system")
        self.n = n
        self.parts = enumerate_partitions(n)
        self.total = sum(r for _, r in rates.items())
        self.blocksets = {}
        self.terms = []
        for b, rho in rates.items():
            below = np.array([i for i, a in enumerate(self.parts) if is_finer(a, b)])
            classes = [self._classes(block) for block in b.blocks]
            self.terms.append((rho, below, [cls[below] for _, cls in classes], [blk for blk, _ in classes]))

    def _classes(self, block):
        if block not in self.blocksets:
            keys = [restrict(c, block).blocks for c in self.parts]
            ids = {k: i for i, k in enumerate(dict.fromkeys(keys))}
            cls = np.array([ids[k] for k in keys])
            onehot = np.zeros((len(ids), len(self.parts)))
            onehot[cls, np.arange(len(self.parts))] = 1.0
            self.blocksets[block] = (onehot, cls)
        return block, self.blocksets[block][1]

    def __call__(self, a) -> np.ndarray:
        a = check_distribution(a, len(self.parts), strict=False)
        sums = {blk: onehot @ a for blk, (onehot, _) in self.blocksets.items()}
        out = -self.total * a
        for rho, below, cls_below, blocks in self.terms:
            prod = np.ones(len(below))
            for blk, cls in zip(blocks, cls_below):
                prod = prod * sums[blk][cls]
            out[below] += rho * prod
        return out


def nonlinear_coeff_rhs(a, rates: RecombinationRates) -> np.ndarray:
    return CoefficientSystem(rates.n, rates)(a)


def product_identity_check(a_part: Partition, b_part: Partition, a) -> tuple:
    """Both sides of the product-over-blocks identity for A <= B.

    lhs = prod_i sum_{C : C|B_i = A|B_i} a(C)
    rhs = (1/|B|) sum_j sum_{tuples} [A == union_i A_{i+j-1}|B_i] prod a(A_i)
    """
    if not is_finer(a_part, b_part):
        raise OrderError(f"{a_part} is not finer than {b_part}")
    n = a_part.n
    parts = enumerate_partitions(n)
    a = np.asarray(a, dtype=float)
    if a.size != len(parts):
        raise DimensionError(f"vector of length {a.size} over {len(parts)} partitions")
    lhs = 1.0
    for block in b_part.blocks:
        target = restrict(a_part, block)
        lhs *= sum(a[k] for k, c in enumerate(parts) if restrict(c, block) == target)
    m = len(b_part)
    restricted = [[restrict(c, block) for c in parts] for block in b_part.blocks]
    rhs = 0.0
    for tup in itertools.product(range(len(parts)), repeat=m):
        weight = float(np.prod(a[list(tup)]))
        for j in range(m):
            pieces = [restricted[i][tup[cyclic_parent(i, j, m)]] for i in range(m)]
            if disjoint_union(pieces) == a_part:
                rhs += weight
    return lhs, rhs / m


def network_to_json(net: ReactionNetwork) -> list:
    """Plain records for dumping; species rendered by their labels."""
    pair_id = {}
    if net.pairing is not None:
        for k, (f, b) in enumerate(net.pairing.pairs):
            pair_id[f] = pair_id[b] = k
    out = []
    for i, r in enumerate(net.reactions):
        out.append({
            "substrates": [net.labels[s] for s in r.substrates],
            "products": [net.labels[s] for s in r.products],
            "kappa": r.kappa,
            "origin": r.origin.label,
            "void": r.void,
            "pair": pair_id.get(i),
        })
    return out


# short aliases
uglyproduct_check = product_identity_check
