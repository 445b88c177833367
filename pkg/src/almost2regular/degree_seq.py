"""Degree sequences for the upper and lower almost-2-regular regimes."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidDegree, OddTotalDegree


class Regime(str, enum.Enum):
    UPPER = "UpperCandidate"
    LOWER = "LowerCandidate"
    MIXED = "Mixed"
    PURE = "PureTwoRegular"


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    """Vertex degrees ``d_0 .. d_{n-1}`` with the derived half-edge counts.

    Half-edges are indexed globally in (vertex, slot) order, so vertex ``v``
    owns half-edges ``offsets[v] .. offsets[v] + d_v - 1``.
    """

    degrees: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.degrees)
        if d.ndim != 1:
            raise InvalidDegree("degrees must be one-dimensional")
        if d.size and not np.issubdtype(d.dtype, np.integer):
            if not np.all(np.mod(d, 1) == 0):
                raise InvalidDegree("degrees must be integers")
        d = d.astype(np.int64, copy=True)
        if d.size and d.min() < 1:
            bad = int(d.min())
            raise InvalidDegree(f"degree {bad} not allowed; every vertex needs at least one half-edge")
        total = int(d.sum())
        if total % 2:
            raise OddTotalDegree(f"total degree {total} is odd")
        d.flags.writeable = False
        object.__setattr__(self, "degrees", d)
        assert self.ell == 2 * self.n2 + self.ell_ne2
        assert self.ell_ne2 % 2 == 0

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "DegreeSequence":
        """Canonical layout: ascending degree blocks, except degree 2 goes first."""
        for deg, cnt in counts.items():
            if cnt < 0:
                raise InvalidDegree(f"negative count {cnt} for degree {deg}")
        order = sorted(counts, key=lambda j: (j != 2, j))
        blocks = [np.full(int(counts[j]), int(j), dtype=np.int64) for j in order]
        return cls(np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64))

    @classmethod
    def from_file(cls, path: str | Path) -> "DegreeSequence":
        degrees = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            degrees.append(int(line))
        return cls(np.array(degrees, dtype=np.int64))

    def to_text(self) -> str:
        return "".join(f"{int(x)}\n" for x in self.degrees)

    @property
    def n(self) -> int:
        return int(self.degrees.size)

    @cached_property
    def ell(self) -> int:
        return int(self.degrees.sum())

    @cached_property
    def counts(self) -> dict[int, int]:
        """``n_j`` for every degree ``j`` present."""
        values, cnt = np.unique(self.degrees, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, cnt)}

    def count(self, j: int) -> int:
        return self.counts.get(j, 0)

    @property
    def n1(self) -> int:
        return self.count(1)

    @property
    def n2(self) -> int:
        return self.count(2)

    @cached_property
    def ell_ne2(self) -> int:
        return sum(j * c for j, c in self.counts.items() if j != 2)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @cached_property
    def offsets(self) -> np.ndarray:
        off = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=off[1:])
        off.flags.writeable = False
        return off

    @cached_property
    def vertex_of(self) -> np.ndarray:
        """Owning vertex of every half-edge."""
        v = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        v.flags.writeable = False
        return v

    def half_edge(self, vertex: int, slot: int) -> int:
        if not 0 <= slot < self.degrees[vertex]:
            raise IndexError(f"vertex {vertex} has no slot {slot}")
        return int(self.offsets[vertex]) + slot

    def __eq__(self, other):
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return np.array_equal(self.degrees, other.degrees)

    def __hash__(self):
        return hash(self.degrees.tobytes())

    def __repr__(self):
        return f"DegreeSequence(n={self.n}, counts={self.counts})"


@dataclass(frozen=True)
class RegimeDiagnostics:
    regime: Regime
    ratio_ell_n: float
    ratio_lne2_n: float


def build_upper(n2: int, higher: Mapping[int, int] | None = None) -> DegreeSequence:
    """``n2`` vertices of degree 2 followed by the given vertices of degree >= 3."""
    higher = dict(higher or {})
    if n2 < 0:
        raise InvalidDegree(f"n2 must be nonnegative, got {n2}")
    for deg in higher:
        if deg < 3:
            raise InvalidDegree(f"higher-degree map has key {deg} < 3")
    return DegreeSequence.from_counts({2: n2, **higher})


def build_lower(n2: int, n1: int) -> DegreeSequence:
    """``n2`` vertices of degree 2 followed by ``n1`` vertices of degree 1."""
    if n2 < 0 or n1 < 0:
        raise InvalidDegree("counts must be nonnegative")
    if n1 % 2:
        raise OddTotalDegree(f"total degree {2 * n2 + n1} is odd (n1={n1})")
    return DegreeSequence.from_counts({2: n2, 1: n1})


def diagnose(seq: DegreeSequence) -> RegimeDiagnostics:
    counts = seq.counts
    if seq.n and set(counts) == {2}:
        regime = Regime.PURE
    elif counts.get(1, 0) == 0 and seq.ell_ne2 > 0:
        regime = Regime.UPPER
    elif counts.get(1, 0) > 0 and seq.max_degree <= 2:
        regime = Regime.LOWER
    else:
        regime = Regime.MIXED
    n = seq.n or 1
    return RegimeDiagnostics(regime, seq.ell / n, seq.ell_ne2 / n)


def parse_degree_spec(items: Iterable[str]) -> dict[int, int]:
    """Parse CLI shorthand like ``["3:30", "4:2"]`` (commas also accepted)."""
    out: Counter[int] = Counter()
    for item in items:
        for part in str(item).split(","):
            part = part.strip()
            if not part:
                continue
            try:
                deg, cnt = part.split(":")
                out[int(deg)] += int(cnt)
            except ValueError:
                raise InvalidDegree(f"cannot parse degree spec {part!r}; expected DEG:COUNT") from None
    return dict(out)
