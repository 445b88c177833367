"""Uniform perfect matchings of half-edges (the configuration model).

A :class:`MultiGraph` stores the matching as a ``partner`` array over the
global half-edge index, which makes self-loops and multi-edges free and keeps
every downstream walk O(1) per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator

import numba
import numpy as np

from .degree_seq import DegreeSequence
from .errors import OddTotalDegree, TooLarge
from .rng import make_rng

ENUMERATION_LIMIT = 14


@dataclass(frozen=True, eq=False)
class MultiGraph:
    seq: DegreeSequence
    partner: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.partner, dtype=np.int64)
        if p.shape != (self.seq.ell,):
            raise ValueError(f"partner array has shape {p.shape}, expected ({self.seq.ell},)")
        p.flags.writeable = False
        object.__setattr__(self, "partner", p)

    @property
    def n(self) -> int:
        return self.seq.n

    @cached_property
    def pairs(self) -> np.ndarray:
        """``(ell/2, 2)`` half-edge pairs, lower index first, sorted."""
        h = np.arange(self.seq.ell, dtype=np.int64)
        lo = h[h < self.partner]
        return np.column_stack([lo, self.partner[lo]])

    @cached_property
    def edges(self) -> np.ndarray:
        """``(ell/2, 2)`` vertex pairs in the same order as :attr:`pairs`."""
        return self.seq.vertex_of[self.pairs]

    def key(self) -> bytes:
        """Canonical encoding of the labelled matching."""
        return self.partner.tobytes()

    def is_perfect_matching(self) -> bool:
        p = self.partner
        h = np.arange(p.size)
        return bool(np.all(p[p] == h) and np.all(p != h))

    def __eq__(self, other):
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self.seq == other.seq and np.array_equal(self.partner, other.partner)

    def __hash__(self):
        return hash(self.key())

    @classmethod
    def from_pairs(cls, seq: DegreeSequence, pairs) -> "MultiGraph":
        partner = np.full(seq.ell, -1, dtype=np.int64)
        for a, b in pairs:
            if partner[a] != -1 or partner[b] != -1 or a == b:
                raise ValueError(f"half-edge pair ({a}, {b}) conflicts with the matching")
            partner[a], partner[b] = b, a
        if np.any(partner < 0):
            raise ValueError("pairs do not cover every half-edge")
        return cls(seq, partner)


@numba.njit(cache=True)
def _pair_sequential(ell, draws):
    # pool holds unmatched half-edges; pos is its inverse; removal swaps with the tail
    pool = np.arange(ell)
    pos = np.arange(ell)
    partner = np.full(ell, -1, dtype=np.int64)
    size = ell
    step = 0
    for h in range(ell):
        if partner[h] != -1:
            continue
        i = pos[h]
        last = pool[size - 1]
        pool[i] = last
        pos[last] = i
        size -= 1
        j = draws[step]
        p = pool[j]
        last = pool[size - 1]
        pool[j] = last
        pos[last] = j
        size -= 1
        partner[h] = p
        partner[p] = h
        step += 1
    return partner


def sample(seq: DegreeSequence, seed: int) -> MultiGraph:
    """Draw ``CM_n(d)``: a uniform perfect matching of the half-edges.

    The smallest unmatched half-edge is paired with a partner chosen uniformly
    among the remaining unmatched ones. The ``ell/2`` partner indices are drawn
    in one vectorised call from PCG64 seeded with ``seed``, so the output is a
    deterministic function of ``(seq, seed)``.
    """
    ell = seq.ell
    if ell % 2:
        raise OddTotalDegree(f"total degree {ell} is odd")
    if ell == 0:
        return MultiGraph(seq, np.zeros(0, dtype=np.int64))
    draws = make_rng(seed).integers(0, _draw_bounds(ell))
    return MultiGraph(seq, _pair_sequential(ell, draws))


@lru_cache(maxsize=64)
def _draw_bounds(ell: int) -> np.ndarray:
    # the k-th pairing chooses among ell - 1 - 2k remaining half-edges
    b = ell - 1 - 2 * np.arange(ell // 2, dtype=np.int64)
    b.flags.writeable = False
    return b


def matching_count(ell: int) -> int:
    """``(ell - 1)!!``, the number of perfect matchings of ``ell`` half-edges."""
    if ell < 0 or ell % 2:
        raise OddTotalDegree(f"ell={ell} must be even and nonnegative")
    return math.prod(range(ell - 1, 0, -2))


def enumerate_matchings(seq: DegreeSequence) -> Iterator[MultiGraph]:
    """Every perfect matching exactly once, in canonical order.

    The smallest unmatched half-edge is paired with each larger unmatched
    candidate in ascending order, recursively.
    """
    ell = seq.ell
    if ell % 2:
        raise OddTotalDegree(f"total degree {ell} is odd")
    if ell > ENUMERATION_LIMIT:
        raise TooLarge(f"ell={ell} exceeds enumeration limit {ENUMERATION_LIMIT}")
    partner = [-1] * ell

    def rec(free: list[int]) -> Iterator[MultiGraph]:
        if not free:
            yield MultiGraph(seq, np.array(partner, dtype=np.int64))
            return
        h, rest = free[0], free[1:]
        for idx, p in enumerate(rest):
            partner[h], partner[p] = p, h
            yield from rec(rest[:idx] + rest[idx + 1:])
        partner[h] = -1

    yield from rec(list(range(ell)))
