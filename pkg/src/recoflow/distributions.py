"""Probability vectors, recombinators and entropy functionals.

Distributions are plain float arrays indexed by the carrier order (type
index for type spaces, enumeration index for partitions).
"""

from __future__ import annotations

import numpy as np

from .errors import BoundaryError, DimensionError, ResourceError, ValidityError
from .partitions import Partition
from .typespace import TypeSpace

TUPLE_WORK_BOUND = 2**24
STRICT_TOL = 1e-12


def seeded_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator for the stream (seed, *keys).

    Philox is keyed through a SeedSequence, so streams for distinct keys
    are independent and reproducible across platforms.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def exponential_variates(rng: np.random.Generator, size=None, rate=1.0):
    """Inverse-CDF exponential variates; strictly positive."""
    # midpoint of the 2**-53 grid keeps u inside the open interval (0, 1)
    u = rng.random(size) + 2.0**-54
    return -np.log(u) / rate


def random_distribution(carrier_size: int, seed: int, *keys: int) -> np.ndarray:
    """Strictly positive distribution from normalised exponential variates.

    Extra ``keys`` select an independent stream, e.g. one per test point.
    """
    if carrier_size < 1:
        raise ValidityError("carrier must have at least one state")
    e = exponential_variates(seeded_rng(seed, *keys), carrier_size)
    return e / e.sum()


def check_distribution(v, size=None, strict=True, tol=STRICT_TOL) -> np.ndarray:
    """Validate a weight vector and return it as a float array.

    Strict mode requires nonnegative entries summing to one within ``tol``;
    relaxed mode (used for Runge-Kutta stages) only requires finiteness.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if size is not None and v.size != size:
        raise DimensionError(f"vector of length {v.size} on a carrier of size {size}")
    if not np.all(np.isfinite(v)):
        raise ValidityError("non-finite weight")
    if strict:
        if v.min(initial=0.0) < -tol:
            raise ValidityError(f"negative weight {v.min():.3e}")
        if abs(v.sum() - 1.0) > tol:
            raise ValidityError(f"weights sum to {v.sum():.17g}")
    return v


def _as_measure(space: TypeSpace, nu, strict=True):
    return check_distribution(nu, space.size, strict=strict)


def marginal(space: TypeSpace, nu, sites) -> np.ndarray:
    """Push-forward of ``nu`` under the projection onto ``sites``.

    The result is indexed mixed-radix over the selected sites in ascending
    order.
    """
    nu = _as_measure(space, nu)
    u = space._sites(sites)
    drop = tuple(i for i in range(space.n) if i + 1 not in u)
    return nu.reshape(space.shape).sum(axis=drop).ravel()


def one_site_marginals(space: TypeSpace, nu) -> list:
    return [marginal(space, nu, [i]) for i in range(1, space.n + 1)]


def recombinator_product(space: TypeSpace, nu, partition: Partition, strict=True) -> np.ndarray:
    """R_A(nu): product of the marginals of ``nu`` over the blocks of A."""
    nu = _as_measure(space, nu, strict=strict)
    if partition.n != space.n:
        raise DimensionError(f"partition of {partition.n} sites on {space.n}-site types")
    arr = nu.reshape(space.shape)
    out = np.ones(space.shape)
    for block in partition.blocks:
        others = tuple(i for i in range(space.n) if i + 1 not in block)
        out = out * arr.sum(axis=others, keepdims=True)
    return out.ravel()


def recombinator_sum(space: TypeSpace, nu, partition: Partition) -> np.ndarray:
    """R_A(nu) as the sum over all |A|-tuples of parents.

    Each tuple (x1, ..., xk) contributes nu(x1)...nu(xk) to the type that
    takes block i from parent i.  Independent of the marginal construction
    and used to cross-check it.
    """
    nu = _as_measure(space, nu)
    if partition.n != space.n:
        raise DimensionError(f"partition of {partition.n} sites on {space.n}-site types")
    k = len(partition)
    work = space.size**k
    if work > TUPLE_WORK_BOUND:
        raise ResourceError(f"{work} parent tuples exceed the bound {TUPLE_WORK_BOUND}")
    parents = np.indices((space.size,) * k).reshape(k, -1).T
    letters = space.types
    child = np.empty((work, space.n), dtype=int)
    for i, block in enumerate(partition.blocks):
        cols = [s - 1 for s in block]
        child[:, cols] = letters[parents[:, i]][:, cols]
    codes = np.ravel_multi_index(child.T, space.shape)
    weights = np.prod(nu[parents], axis=1)
    return np.bincount(codes, weights=weights, minlength=space.size)


def _xlogx(c):
    c = np.asarray(c, dtype=float)
    out = np.zeros_like(c)
    pos = c > 0
    out[pos] = c[pos] * np.log(c[pos])
    return out


def entropy_sum(c) -> float:
    """sum_s c(s) log c(s) with 0 log 0 = 0 (a non-positive number)."""
    return float(_xlogx(c).sum())


def free_energy(c) -> float:
    """Negative free energy F(c) = -sum_s (c(s) log c(s) - c(s))."""
    c = np.asarray(c, dtype=float)
    return float(-(_xlogx(c) - c).sum())


def grad_free_energy(c) -> np.ndarray:
    """Gradient of F; entry s is -log c(s).  Undefined on the boundary."""
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0):
        raise BoundaryError("gradient of the free energy needs strictly positive weights")
    return -np.log(c)
