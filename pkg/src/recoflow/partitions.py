"""Set partitions of the site set {1, ..., n}.

Blocks are stored as ascending tuples of 1-based site indices and ordered by
their least element, so two partitions are equal exactly when their block
tuples are equal.  All enumerations run over restricted-growth strings in
lexicographic order; the first partition is therefore the single-block
partition and the last one is the partition into singletons.

The number of partitions is the Bell number, which grows quickly
(1, 2, 5, 15, 52, 203, 877, 4140 for n = 1..8); n = 8 is the ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import BoundsError, DimensionError, ValidityError

MAX_SITES = 8


def _order_blocks(blocks):
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))


@dataclass(frozen=True)
class Partition:
    """A canonically ordered partition of {1, ..., n}."""

    n: int
    blocks: tuple

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __str__(self):
        return format_blocks(self.blocks)

    def __repr__(self):
        return f"Partition({self})"

    def __lt__(self, other):
        # enumeration order, so sorted complexes read like the carrier
        if not isinstance(other, Partition):
            return NotImplemented
        return (self.n, self.growth_string()) < (other.n, other.growth_string())

    @property
    def label(self) -> str:
        return format_blocks(self.blocks)

    def growth_string(self) -> tuple:
        """Restricted-growth string: entry i-1 is the 0-based block of site i."""
        out = [0] * self.n
        for k, block in enumerate(self.blocks):
            for site in block:
                out[site - 1] = k
        return tuple(out)

    def block_of(self, site: int) -> tuple:
        for block in self.blocks:
            if site in block:
                return block
        raise BoundsError(f"site {site} not in 1..{self.n}")


@dataclass(frozen=True)
class SubsetPartition:
    """A partition of a subset U of the sites, e.g. the restriction A|_U."""

    support: tuple
    blocks: tuple

    def __len__(self):
        return len(self.blocks)

    def __str__(self):
        return format_blocks(self.blocks)


def format_blocks(blocks) -> str:
    return "|".join(",".join(str(s) for s in b) for b in blocks)


def _check_n(n):
    if not isinstance(n, int) or n < 1 or n > MAX_SITES:
        raise BoundsError(f"site count must be in 1..{MAX_SITES}, got {n!r}")


def canonicalize(n: int, raw_blocks: Iterable[Iterable[int]]) -> Partition:
    """Build a Partition from blocks given in any order.

    Raises ValidityError on empty blocks, overlaps, or sites missing from the
    union.
    """
    _check_n(n)
    blocks = [tuple(b) for b in raw_blocks]
    seen = set()
    for b in blocks:
        if not b:
            raise ValidityError("empty block")
        for s in b:
            if not isinstance(s, int) or s < 1 or s > n:
                raise ValidityError(f"site {s!r} outside 1..{n}")
            if s in seen:
                raise ValidityError(f"site {s} appears in more than one block")
            seen.add(s)
    if len(seen) != n:
        missing = sorted(set(range(1, n + 1)) - seen)
        raise ValidityError(f"sites {missing} are not covered")
    return Partition(n, _order_blocks(blocks))


def parse_partition(text: str, n: int | None = None) -> Partition:
    """Parse the textual form ``"1,2|3"``; block order in the input is free.

    If ``n`` is omitted it is taken to be the largest site mentioned.
    """
    try:
        blocks = [[int(tok) for tok in part.split(",")] for part in text.strip().split("|")]
    except ValueError:
        raise ValidityError(f"cannot parse partition {text!r}") from None
    if n is None:
        n = max(max(b) for b in blocks)
    return canonicalize(n, blocks)


def from_growth_string(rgs: Sequence[int]) -> Partition:
    n = len(rgs)
    blocks = {}
    for site, k in enumerate(rgs, start=1):
        blocks.setdefault(k, []).append(site)
    return Partition(n, tuple(tuple(blocks[k]) for k in sorted(blocks)))


@lru_cache(maxsize=None)
def enumerate_partitions(n: int) -> tuple:
    """All partitions of {1..n} in lexicographic restricted-growth order."""
    _check_n(n)
    out = []

    def extend(prefix, top):
        if len(prefix) == n:
            out.append(from_growth_string(prefix))
            return
        for k in range(top + 2):
            extend(prefix + [k], max(top, k))

    extend([0], 0)
    return tuple(out)


@lru_cache(maxsize=None)
def partition_index(n: int) -> dict:
    return {p: i for i, p in enumerate(enumerate_partitions(n))}


def coarsest(n: int) -> Partition:
    """The single-block partition {{1..n}}."""
    _check_n(n)
    return Partition(n, (tuple(range(1, n + 1)),))


def finest(n: int) -> Partition:
    """The partition into singletons."""
    _check_n(n)
    return Partition(n, tuple((i,) for i in range(1, n + 1)))


def _same_n(a, b):
    if a.n != b.n:
        raise DimensionError(f"partitions of {a.n} and {b.n} sites")


def is_finer(a: Partition, b: Partition) -> bool:
    """True iff every block of ``a`` lies inside some block of ``b``."""
    _same_n(a, b)
    gb = b.growth_string()
    return all(len({gb[s - 1] for s in block}) == 1 for block in a.blocks)


def meet(a: Partition, b: Partition) -> Partition:
    """Coarsest common refinement: non-empty pairwise block intersections."""
    _same_n(a, b)
    parts = []
    for x in a.blocks:
        sx = set(x)
        for y in b.blocks:
            inter = sx.intersection(y)
            if inter:
                parts.append(inter)
    return Partition(a.n, _order_blocks(parts))


def _check_subset(n, sites):
    u = tuple(sorted(set(sites)))
    if not u:
        raise BoundsError("empty site set")
    if u[0] < 1 or u[-1] > n:
        raise BoundsError(f"site set {u} not within 1..{n}")
    return u


def restrict(a: Partition, sites: Iterable[int]) -> SubsetPartition:
    """The partition of ``sites`` induced by ``a``."""
    u = _check_subset(a.n, sites)
    su = set(u)
    parts = [su.intersection(b) for b in a.blocks]
    return SubsetPartition(u, _order_blocks(p for p in parts if p))


def disjoint_union(parts: Sequence[SubsetPartition]) -> Partition:
    """Union of partitions of pairwise disjoint subsets that cover {1..n}."""
    sites = [s for p in parts for s in p.support]
    if len(sites) != len(set(sites)):
        raise ValidityError("supports overlap")
    n = len(sites)
    if set(sites) != set(range(1, n + 1)):
        raise ValidityError(f"supports {sorted(sites)} do not cover 1..{n}")
    return Partition(n, _order_blocks(b for p in parts for b in p.blocks))


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        new = [row[-1]]
        for x in row:
            new.append(new[-1] + x)
        row = new
    return row[0]
