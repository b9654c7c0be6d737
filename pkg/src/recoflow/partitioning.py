"""The backward partitioning process and its generalised gradient form.

The process lives on the partitions of the sites.  A block A of the current
state is replaced by the blocks of C|_A at rate rho(C); events with
C|_A = {A} leave the state unchanged and are dropped from the generator
altogether, so the diagonal only carries real outflow.  Along every path
the number of blocks strictly increases, which makes the law of the process
a Markov chain with strictly monotone orbits with respect to W(A) = |A|.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distributions import check_distribution, exponential_variates, recombinator_product, seeded_rng
from .dynamics import RecombinationRates, Trajectory, integrate_simplex
from .errors import BoundsError, DimensionError, HorizonError, MonotonicityError, ValidityError
from .partitions import Partition, SubsetPartition, enumerate_partitions, is_finer, partition_index, restrict
from .typespace import TypeSpace

MAX_GENERATOR_SITES = 6


@dataclass(frozen=True)
class GeneratorMatrix:
    Q: np.ndarray
    states: tuple

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        return self.states.index(state)

    def block_counts(self) -> np.ndarray:
        return np.array([len(s) for s in self.states], dtype=float)


def marginal_rate(rates: RecombinationRates, block, induced: SubsetPartition) -> float:
    """Total rate of the partitions C with C|_block equal to ``induced``."""
    block = tuple(sorted(block))
    if tuple(induced.support) != block:
        raise ValidityError(f"{induced} does not partition {block}")
    return float(sum(r for c, r in rates.items() if restrict(c, block) == induced))


def build_generator(n: int, rates: RecombinationRates) -> GeneratorMatrix:
    """Rate matrix of the partitioning process over all partitions of n sites."""
    if n > MAX_GENERATOR_SITES:
        raise BoundsError(f"generator supports at most {MAX_GENERATOR_SITES} sites")
    if rates.n != n:
        raise DimensionError(f"rates on {rates.n} sites for an {n}-site generator")
    states = enumerate_partitions(n)
    index = partition_index(n)
    q = np.zeros((len(states), len(states)))
    support = rates.items()
    for i, a in enumerate(states):
        for block in a.blocks:
            rest = [b for b in a.blocks if b != block]
            for c, r in support:
                induced = restrict(c, block)
                if len(induced) == 1:
                    continue
                target = Partition(n, tuple(sorted(rest + list(induced.blocks), key=lambda b: b[0])))
                q[i, index[target]] += r
        q[i, i] = -q[i].sum() + 0.0  # avoid -0.0 on absorbing rows
    return GeneratorMatrix(q, states)


def check_generator(gen: GeneratorMatrix, tol=1e-12) -> None:
    """Raise ValidityError unless rows sum to zero and jumps strictly refine."""
    q = gen.Q
    off = q - np.diag(np.diag(q))
    if np.any(off < 0):
        raise ValidityError("negative off-diagonal rate")
    if np.max(np.abs(q.sum(axis=1))) > tol:
        raise ValidityError("rows do not sum to zero")
    for i, j in zip(*np.nonzero(off)):
        a, b = gen.states[i], gen.states[j]
        if a == b or not is_finer(b, a):
            raise ValidityError(f"jump {a} -> {b} is not a strict refinement")


def master_rhs(q, b) -> np.ndarray:
    q = getattr(q, "Q", q)
    b = np.asarray(b, dtype=float)
    if b.shape != (q.shape[0],):
        raise DimensionError(f"vector of shape {b.shape} for a {q.shape[0]}-state chain")
    return q.T @ b


def integrate_master(q, b0=None, t_end=1.0, dt=1e-3, sample_every=1) -> Trajectory:
    """RK4 solution of db/dt = Q^T b; b0 defaults to the point mass on the single block."""
    gen = q if isinstance(q, GeneratorMatrix) else None
    q = getattr(q, "Q", q)
    if b0 is None:
        if gen is None:
            raise ValueError("b0 is required for a bare rate matrix")
        b0 = np.zeros(gen.size)
        b0[0] = 1.0
    b0 = check_distribution(b0, q.shape[0])
    times, states, worst = integrate_simplex(lambda b: q.T @ b, b0, t_end, dt, sample_every)
    monitors = {}
    if gen is not None:
        monitors["N"] = states @ gen.block_counts()
    return Trajectory(times, states, monitors, worst)


def has_monotone_observable(q, w) -> bool:
    q = np.asarray(getattr(q, "Q", q), dtype=float)
    w = np.asarray(w, dtype=float)
    i, j = np.nonzero(q - np.diag(np.diag(q)) > 0)
    return bool(np.all(w[j] > w[i]))


def monotone_gradient_matrix(q, w, p) -> np.ndarray:
    """K(p) = sum_{Q(i,j)>0} p(i) Q(i,j) / (W(j)-W(i)) (e_j - e_i)(e_j - e_i)^T."""
    q = np.asarray(getattr(q, "Q", q), dtype=float)
    w = np.asarray(w, dtype=float)
    p = np.asarray(p, dtype=float)
    if p.shape != (q.shape[0],) or w.shape != (q.shape[0],):
        raise DimensionError("potential and weights must match the state space")
    if np.any(p < 0):
        raise ValidityError("weights must be nonnegative")
    if not has_monotone_observable(q, w):
        raise MonotonicityError("a positive rate does not strictly increase the potential")
    off = q - np.diag(np.diag(q))
    i, j = np.nonzero(off > 0)
    coef = p[i] * off[i, j] / (w[j] - w[i])
    k = np.zeros_like(q)
    np.add.at(k, (i, i), coef)
    np.add.at(k, (j, j), coef)
    np.add.at(k, (i, j), -coef)
    np.add.at(k, (j, i), -coef)
    return k


def jordan_example():
    """Four-state chain A -> B, C at rate 1 and B, C -> D at rate 2, with W = (1, 2, 2, 3)."""
    q = np.array([[-2, 1, 1, 0], [0, -2, 0, 2], [0, 0, -2, 2], [0, 0, 0, 0]], dtype=float)
    return q, np.array([1.0, 2.0, 2.0, 3.0])


def exact_rank(m) -> int:
    """Rank over the rationals by fraction-exact Gaussian elimination."""
    rows = [[Fraction(x) for x in row] for row in np.asarray(m).tolist()]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def eigen_multiplicities(m, eigenvalue) -> tuple:
    """(algebraic, geometric) multiplicity of an eigenvalue of a rational matrix."""
    a = [[Fraction(x) for x in row] for row in np.asarray(m).tolist()]
    n = len(a)
    lam = Fraction(eigenvalue)
    shifted = [[a[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    geometric = n - exact_rank(shifted)
    power = shifted
    for _ in range(n - 1):
        power = [[sum(power[i][k] * shifted[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    algebraic = n - exact_rank(power)
    return algebraic, geometric


@dataclass(frozen=True)
class PathSample:
    jump_times: tuple
    states: tuple
    seed: int
    index: int
    horizon: float

    def state_at(self, t: float):
        if t > self.horizon:
            raise HorizonError(f"path simulated to {self.horizon}, asked for {t}")
        k = int(np.searchsorted(self.jump_times, t, side="right"))
        return self.states[k]


def _thread_count():
    try:
        return max(1, int(os.environ.get("RECOFLOW_THREADS", "1")))
    except ValueError:
        return 1


def simulate_paths(gen: GeneratorMatrix, start, t_end: float, n_paths: int, seed: int, workers=None) -> list:
    """Gillespie paths of the chain, path k drawn from the stream (seed, k).

    Worker threads (``RECOFLOW_THREADS`` by default) split the path range;
    output order and values do not depend on the thread count.
    """
    if n_paths < 1:
        raise BoundsError("need at least one path")
    if not t_end > 0:
        raise BoundsError("t_end must be positive")
    start_idx = start if isinstance(start, (int, np.integer)) else gen.index(start)
    q = gen.Q
    exits, targets, cums = [], [], []
    for i in range(gen.size):
        row = q[i].copy()
        row[i] = 0.0
        nz = np.nonzero(row > 0)[0]
        exits.append(float(row.sum()))
        targets.append(nz)
        cums.append(np.cumsum(row[nz]))

    def one(k):
        rng = seeded_rng(seed, 2, k)
        t, s = 0.0, start_idx
        times, states = [], [gen.states[s]]
        while exits[s] > 0:
            t += float(exponential_variates(rng, rate=exits[s]))
            if t > t_end:
                break
            u = rng.random() * cums[s][-1]
            pick = min(int(np.searchsorted(cums[s], u, side="right")), len(targets[s]) - 1)
            s = int(targets[s][pick])
            times.append(t)
            states.append(gen.states[s])
        return PathSample(tuple(times), tuple(states), int(seed), k, float(t_end))

    workers = workers or _thread_count()
    if workers == 1:
        return [one(k) for k in range(n_paths)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(n_paths)))


def occupancy(paths: Sequence[PathSample], t: float, states: Sequence) -> np.ndarray:
    """Empirical distribution of the path states at time t."""
    index = {s: i for i, s in enumerate(states)}
    counts = np.zeros(len(states))
    for path in paths:
        counts[index[path.state_at(t)]] += 1
    return counts / len(paths)


def recombinator_table(space: TypeSpace, omega0, states=None) -> np.ndarray:
    """Rows R_A(omega0) for every partition A (enumeration order by default)."""
    states = states if states is not None else enumerate_partitions(space.n)
    return np.array([recombinator_product(space, omega0, a) for a in states])


def reconstruct(space: TypeSpace, omega0, coeffs, states=None) -> np.ndarray:
    """sum_A coeffs(A) R_A(omega0)."""
    table = recombinator_table(space, omega0, states)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (table.shape[0],):
        raise DimensionError(f"{coeffs.shape[0]} coefficients for {table.shape[0]} partitions")
    return coeffs @ table


def mc_dual_estimate(space: TypeSpace, paths: Sequence[PathSample], omega0, t: float, return_stderr=False):
    """Average of R_{Sigma_t}(omega0) over sampled paths.

    With paths started at the single block this estimates omega_t; started
    at A it estimates R_A(omega_t).  The standard error is per entry, from the
    sample variance across paths.
    """
    omega0 = check_distribution(omega0, space.size)
    if not paths:
        raise BoundsError("need at least one path")
    counts = Counter(path.state_at(t) for path in paths)
    rows = {state: recombinator_product(space, omega0, state) for state in counts}
    n = len(paths)
    if len(counts) == 1:
        # every path agrees, so the estimate is that row with no rounding
        mean = next(iter(rows.values())).copy()
    else:
        mean = sum(k * rows[s] for s, k in counts.items()) / n
    if not return_stderr:
        return mean
    if n == 1:
        return mean, np.full(space.size, np.inf)
    sq = sum(k * (rows[s] - mean) ** 2 for s, k in counts.items())
    stderr = np.sqrt(sq / (n - 1)) / np.sqrt(n)
    return mean, stderr



# short aliases
is_mcsmo = has_monotone_observable
mcsmo_matrix = monotone_gradient_matrix
