"""Forward recombination dynamics on a finite type space.

The type distribution evolves by

    d omega/dt = sum_A rho(A) (R_A(omega) - omega),

integrated here with classical fixed-step RK4.  Fixed steps keep different
formulations of the same flow comparable step for step.  Keep
dt * sum(rho) <= 0.01 for the positivity and accuracy guarantees below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Mapping

import numpy as np

from .distributions import (
    check_distribution,
    entropy_sum,
    free_energy,
    one_site_marginals,
    recombinator_product,
    seeded_rng,
)
from .errors import BoundsError, DegenerateInputError, DimensionError, IntegrationError, ValidityError
from .partitions import Partition, coarsest, enumerate_partitions, meet, parse_partition
from .typespace import TypeSpace

RENORM_TOL = 1e-9
EPS = np.finfo(float).eps


class RecombinationRates:
    """Nonnegative rates rho(A) keyed by partition; missing keys mean zero."""

    def __init__(self, n: int, rates: Mapping | None = None):
        self.n = int(n)
        self._rates = {}
        for key, value in (rates or {}).items():
            p = parse_partition(key, self.n) if isinstance(key, str) else key
            if not isinstance(p, Partition) or p.n != self.n:
                raise DimensionError(f"rate key {key!r} is not a partition of {self.n} sites")
            value = float(value)
            if not np.isfinite(value) or value < 0:
                raise ValidityError(f"rate for {p} must be finite and nonnegative, got {value}")
            if p in self._rates:
                raise ValidityError(f"duplicate rate for {p}")
            self._rates[p] = value

    @classmethod
    def random(cls, n: int, seed: int, low=0.0, high=2.0, support=None):
        """Rates drawn uniformly from [low, high] on ``support``.

        ``support`` defaults to every partition except the single-block one.
        """
        if support is None:
            support = enumerate_partitions(n)[1:]
        rng = seeded_rng(seed, 1)
        draws = low + (high - low) * rng.random(len(support))
        return cls(n, dict(zip(support, draws)))

    @classmethod
    def two_parent_three_locus(cls, rho1, rho2, rho3):
        """rho_i is the rate of the partition {{i}, {1,2,3} minus i}."""
        return cls(3, {"1|2,3": rho1, "1,3|2": rho2, "1,2|3": rho3})

    def __getitem__(self, p: Partition) -> float:
        return self._rates.get(p, 0.0)

    def items(self):
        """Partitions with positive rate, in enumeration order."""
        return [(p, self._rates[p]) for p in enumerate_partitions(self.n) if self._rates.get(p, 0.0) > 0]

    def support(self):
        return [p for p, _ in self.items()]

    @property
    def total(self) -> float:
        return float(sum(self._rates.values()))

    def as_dict(self) -> dict:
        return {p.label: r for p, r in self.items()}

    def __repr__(self):
        return f"RecombinationRates({self.n}, {self.as_dict()})"


def _check_rates(space: TypeSpace, rates: RecombinationRates):
    if rates.n != space.n:
        raise DimensionError(f"rates on {rates.n} sites for {space.n}-site types")


def reco_rhs(space: TypeSpace, nu, rates: RecombinationRates) -> np.ndarray:
    """Right-hand side sum_A rho(A) (R_A(nu) - nu); accepts relaxed vectors."""
    _check_rates(space, rates)
    nu = check_distribution(nu, space.size, strict=False)
    out = np.zeros(space.size)
    for p, r in rates.items():
        out += r * (recombinator_product(space, nu, p, strict=False) - nu)
    return out


def reco_field(space: TypeSpace, rates: RecombinationRates) -> Callable:
    """Compiled form of reco_rhs for repeated evaluation inside an integrator.

    Skips input validation and computes each block marginal once per call,
    shared between all partitions that contain the block.
    """
    _check_rates(space, rates)
    support = rates.items()
    total = sum(r for _, r in support)
    blocks = sorted({b for p, _ in support for b in p.blocks})
    drop = {b: tuple(i for i in range(space.n) if i + 1 not in b) for b in blocks}
    shape = space.shape

    def f(y):
        arr = y.reshape(shape)
        sums = {b: arr.sum(axis=drop[b], keepdims=True) for b in blocks}
        out = np.zeros(shape)
        for p, r in support:
            term = sums[p.blocks[0]]
            for b in p.blocks[1:]:
                term = term * sums[b]
            out += r * term
        return out.ravel() - total * y

    return f


def absorbing_partition(rates: RecombinationRates) -> Partition:
    """Meet of all partitions with positive rate (the single block excluded)."""
    top = coarsest(rates.n)
    support = [p for p in rates.support() if p != top]
    if not support:
        raise DegenerateInputError("no positive rate on a partition with more than one block")
    return reduce(meet, support)


def equilibrium_prediction(space: TypeSpace, nu0, rates: RecombinationRates) -> np.ndarray:
    """Predicted long-time limit R_{sigma*}(nu0)."""
    _check_rates(space, rates)
    return recombinator_product(space, nu0, absorbing_partition(rates))


def rk4_step(f: Callable, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_count(t_end: float, dt: float) -> int:
    if not (t_end > 0 and dt > 0):
        raise BoundsError("t_end and dt must be positive")
    steps = int(round(t_end / dt))
    if steps < 1 or abs(steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise BoundsError(f"t_end={t_end} is not a whole number of steps of dt={dt}")
    return steps


def integrate_simplex(f: Callable, y0, t_end, dt, sample_every=1, tol=RENORM_TOL):
    """Fixed-step RK4 for a flow on the probability simplex.

    After every step tiny negative entries are clipped and the state is
    rescaled to mass one, unless the mass is already one up to roundoff.  A step needing a correction above ``tol`` raises
    IntegrationError.  Returns sample times, sampled states and the largest
    correction applied.
    """
    steps = step_count(t_end, dt)
    if sample_every < 1:
        raise BoundsError("sample_every must be at least 1")
    y = np.array(y0, dtype=float)
    times, states = [0.0], [y.copy()]
    worst = 0.0
    for k in range(1, steps + 1):
        y = rk4_step(f, y, dt)
        t = k * dt
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at t={t:.6g}", time=t)
        neg = max(0.0, -float(y.min()))
        drift = abs(float(y.sum()) - 1.0)
        if neg > tol or drift > tol:
            raise IntegrationError(
                f"state left the simplex at t={t:.6g} (negative part {neg:.3e}, mass drift {drift:.3e})",
                time=t,
            )
        worst = max(worst, neg, drift)
        # leave summation roundoff alone so a vanishing field keeps y fixed
        if neg > 0.0 or drift > y.size * EPS:
            y = np.clip(y, 0.0, None)
            y /= y.sum()
        if k % sample_every == 0 or k == steps:
            times.append(t)
            states.append(y.copy())
    return np.array(times), np.array(states), worst


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    monitors: dict = field(default_factory=dict)
    max_correction: float = 0.0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise BoundsError(f"time {t} was not sampled")
        return self.states[i]


def monitor_columns(space: TypeSpace):
    cols = ["sum_clogc", "F"]
    cols += [f"marg_{i}_{a}" for i in range(1, space.n + 1) for a in range(space.alphabet_sizes[i - 1])]
    cols.append("dist_to_eq")
    return cols


def compute_monitors(space: TypeSpace, states, target) -> dict:
    rows = []
    for s in states:
        row = [entropy_sum(s), free_energy(s)]
        for m in one_site_marginals(space, s):
            row.extend(m)
        row.append(float(np.max(np.abs(s - target))))
        rows.append(row)
    rows = np.array(rows)
    return {name: rows[:, j] for j, name in enumerate(monitor_columns(space))}


def integrate(space: TypeSpace, nu0, rates: RecombinationRates, t_end: float, dt: float, sample_every: int = 1) -> Trajectory:
    """Integrate the recombination equation from ``nu0`` up to ``t_end``."""
    _check_rates(space, rates)
    nu0 = check_distribution(nu0, space.size)
    times, states, worst = integrate_simplex(reco_field(space, rates), nu0, t_end, dt, sample_every)
    try:
        target = equilibrium_prediction(space, nu0, rates)
    except DegenerateInputError:
        # nothing recombines, so the state never moves
        target = nu0
    return Trajectory(times, states, compute_monitors(space, states, target), worst)


def lyapunov_violation(traj: Trajectory) -> float:
    """Largest increase of sum c log c between consecutive samples (0 if none)."""
    h = traj.monitors["sum_clogc"]
    if h.size < 2:
        return 0.0
    return max(0.0, float(np.max(np.diff(h))))


def marginal_drift(traj: Trajectory) -> float:
    cols = [k for k in traj.monitors if k.startswith("marg_")]
    m = np.array([traj.monitors[k] for k in cols])
    return float(np.max(np.abs(m - m[:, :1])))
