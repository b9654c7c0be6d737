"""Finite product type spaces X = X_1 x ... x X_n.

Letters are abstract indices 0..|X_i|-1.  Types are encoded mixed-radix with
site 1 most significant, so for diallelic loci (i1, i2, i3) has index
4*i1 + 2*i2 + i3.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundsError, ValidityError

MAX_TYPES = 2**20


@dataclass(frozen=True)
class Fragment:
    """Letters of a type on an ascending set of sites (1-based)."""

    support: tuple
    letters: tuple


@dataclass(frozen=True)
class TypeSpace:
    alphabet_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.alphabet_sizes)
        if not sizes:
            raise BoundsError("need at least one site")
        if any(k < 1 for k in sizes):
            raise BoundsError(f"alphabet sizes must be positive, got {sizes}")
        if int(np.prod(sizes)) > MAX_TYPES:
            raise BoundsError(f"type space of size {int(np.prod(sizes))} exceeds {MAX_TYPES}")
        object.__setattr__(self, "alphabet_sizes", sizes)

    @classmethod
    def binary(cls, n: int) -> "TypeSpace":
        return cls((2,) * n)

    @property
    def n(self) -> int:
        return len(self.alphabet_sizes)

    @property
    def shape(self) -> tuple:
        return self.alphabet_sizes

    @property
    def size(self) -> int:
        return int(np.prod(self.alphabet_sizes))

    @cached_property
    def types(self) -> np.ndarray:
        """Decoded letters of every type, one row per type index."""
        return np.array(np.unravel_index(np.arange(self.size), self.shape)).T.copy()

    def check(self, x: Sequence[int]) -> tuple:
        x = tuple(int(v) for v in x)
        if len(x) != self.n:
            raise BoundsError(f"type of length {len(x)} on {self.n} sites")
        for i, (v, k) in enumerate(zip(x, self.alphabet_sizes), start=1):
            if not 0 <= v < k:
                raise BoundsError(f"letter {v} at site {i} outside 0..{k - 1}")
        return x

    def encode(self, x: Sequence[int]) -> int:
        return int(np.ravel_multi_index(self.check(x), self.shape))

    def decode(self, idx: int) -> tuple:
        if not 0 <= idx < self.size:
            raise BoundsError(f"type index {idx} outside 0..{self.size - 1}")
        return tuple(int(v) for v in np.unravel_index(idx, self.shape))

    def label(self, x: Sequence[int]) -> str:
        """Letter string used in CSV headers and network dumps."""
        sep = "" if max(self.alphabet_sizes) <= 10 else "."
        return sep.join(str(v) for v in x)

    def parse_label(self, text: str) -> tuple:
        text = text.strip()
        if "," in text or "." in text:
            parts = text.replace(".", ",").split(",")
        else:
            parts = list(text)
        try:
            return self.check(int(p) for p in parts)
        except ValueError:
            raise BoundsError(f"cannot parse type {text!r}") from None

    def _sites(self, sites):
        u = tuple(sorted(set(int(s) for s in sites)))
        if not u or u[0] < 1 or u[-1] > self.n:
            raise BoundsError(f"site set {u} not a nonempty subset of 1..{self.n}")
        return u

    def project(self, x: Sequence[int], sites: Iterable[int]) -> Fragment:
        x = self.check(x)
        u = self._sites(sites)
        return Fragment(u, tuple(x[s - 1] for s in u))

    def join(self, fragments: Sequence[Fragment]) -> tuple:
        """Assemble a full type from fragments on disjoint covering supports."""
        out = [None] * self.n
        for frag in fragments:
            if len(frag.support) != len(frag.letters):
                raise ValidityError("fragment support and letters differ in length")
            for s, v in zip(frag.support, frag.letters):
                if not 1 <= s <= self.n:
                    raise ValidityError(f"site {s} outside 1..{self.n}")
                if out[s - 1] is not None:
                    raise ValidityError(f"site {s} covered twice")
                out[s - 1] = v
        if any(v is None for v in out):
            missing = [i + 1 for i, v in enumerate(out) if v is None]
            raise ValidityError(f"sites {missing} not covered")
        return self.check(out)
