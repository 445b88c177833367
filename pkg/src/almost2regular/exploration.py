"""Active/dead/neutral exploration of a configuration model.

Two flavours:

* :func:`explore` walks a materialized :class:`MultiGraph`; every pairing is
  read from the graph.
* :func:`explore_lazy` samples the matching on demand. Neutral half-edges of
  the same degree class are exchangeable under the uniform matching, so the
  state is just the number of active half-edges plus the number of neutral
  vertices per degree class.

Steps are numbered from 1. ``t_ne2`` is the first step whose partner is a
*neutral* half-edge of a vertex of degree != 2, ``t_cycle`` the first step
whose partner is already active. Both are ``None`` when the event never
happens (or happens after the cap). The default cap is ``ell / 2``, the
total number of pairings, so it only ever stops runaway loops.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator

import numba
import numpy as np

from .degree_seq import DegreeSequence
from .errors import InvalidDegree
from .rng import make_rng
from .sampler import MultiGraph

NEUTRAL, ACTIVE, DEAD = 0, 1, 2


class Outcome(str, enum.Enum):
    HIT_NON_TWO = "HitNonTwo"
    CLOSED_CYCLE = "ClosedCycle"
    EXHAUSTED = "Exhausted"
    CAP_REACHED = "CapReached"


@dataclass(frozen=True)
class ExplorationTrace:
    start: int
    steps: int
    t_ne2: int | None
    t_cycle: int | None
    outcome: Outcome
    component_size: int
    max_active: int

    def survived(self, k: int) -> bool:
        """No pairing into a neutral degree-!=2 half-edge during steps ``1..k``."""
        return self.t_ne2 is None or self.t_ne2 > k

    def to_dict(self) -> dict:
        d = asdict(self)
        d["outcome"] = self.outcome.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _outcome(t_ne2, t_cycle, capped: bool) -> Outcome:
    if t_cycle is not None and (t_ne2 is None or t_cycle < t_ne2):
        return Outcome.CLOSED_CYCLE
    if t_ne2 is not None:
        return Outcome.HIT_NON_TWO
    return Outcome.CAP_REACHED if capped else Outcome.EXHAUSTED


def explore(g: MultiGraph, start: int, rng: np.random.Generator | None = None,
            cap: int | None = None) -> ExplorationTrace:
    """Explore the component of ``start`` until no active half-edge is left.

    Without ``rng`` the most recently activated half-edge is paired next, which
    walks degree-2 chains end to end; with ``rng`` the active half-edge is
    chosen uniformly.
    """
    seq = g.seq
    if not 0 <= start < seq.n:
        raise IndexError(f"start vertex {start} out of range")
    deg = seq.degrees
    offsets = seq.offsets
    vertex_of = seq.vertex_of
    partner = g.partner
    cap = seq.ell // 2 if cap is None else cap

    state = np.zeros(seq.ell, dtype=np.int8)
    lo, hi = int(offsets[start]), int(offsets[start + 1])
    active = list(range(lo, hi))
    state[lo:hi] = ACTIVE
    size = 1
    step = 0
    t_ne2 = t_cycle = None
    max_active = len(active)
    while active and step < cap:
        step += 1
        if rng is None:
            e1 = active.pop()
        else:
            i = int(rng.integers(len(active)))
            active[i], active[-1] = active[-1], active[i]
            e1 = active.pop()
        e2 = int(partner[e1])
        state[e1] = DEAD
        if state[e2] == ACTIVE:
            active.remove(e2)
            if t_cycle is None:
                t_cycle = step
        else:
            w = int(vertex_of[e2])
            size += 1
            if deg[w] != 2 and t_ne2 is None:
                t_ne2 = step
            for h in range(int(offsets[w]), int(offsets[w + 1])):
                if h != e2:
                    state[h] = ACTIVE
                    active.append(h)
        state[e2] = DEAD
        max_active = max(max_active, len(active))
    assert t_ne2 is None or t_ne2 != t_cycle
    return ExplorationTrace(start, step, t_ne2, t_cycle, _outcome(t_ne2, t_cycle, bool(active)),
                            size, max_active)


@numba.njit(cache=True)
def _lazy_steps(class_deg, class_cnt, state, u, cap):
    # state: active, step, t_ne2, t_cycle, size, max_active, neutral half-edges
    used = 0
    while state[0] > 0 and state[1] < cap and used < u.size:
        state[1] += 1
        step = state[1]
        state[0] -= 1
        active = state[0]
        total = active + state[6]
        x = np.int64(u[used] * total)
        used += 1
        if x >= total:
            x = total - 1
        if x < active:
            state[0] -= 1
            if state[3] < 0:
                state[3] = step
            continue
        x -= active
        for j in range(class_deg.size):
            w = class_deg[j] * class_cnt[j]
            if x < w:
                d = class_deg[j]
                class_cnt[j] -= 1
                state[6] -= d
                state[0] += d - 1
                state[4] += 1
                if d != 2 and state[2] < 0:
                    state[2] = step
                break
            x -= w
        if state[0] > state[5]:
            state[5] = state[0]
    return used


def explore_lazy(seq: DegreeSequence, start: int, seed: int, cap: int | None = None) -> ExplorationTrace:
    """Exploration from ``start`` with the matching revealed one pairing at a time.

    Each step consumes one uniform double from PCG64(``seed``); the partner is
    uniform over the unmatched half-edges other than the one being paired.
    Time and memory are O(steps) plus the number of degree classes.
    """
    if not 0 <= start < seq.n:
        raise IndexError(f"start vertex {start} out of range")
    cap = seq.ell // 2 if cap is None else int(cap)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    classes = seq.counts
    class_deg = np.array(sorted(classes), dtype=np.int64)
    class_cnt = np.array([classes[d] for d in class_deg], dtype=np.int64)
    d0 = int(seq.degrees[start])
    class_cnt[np.searchsorted(class_deg, d0)] -= 1
    state = np.array([d0, 0, -1, -1, 1, d0, int((class_deg * class_cnt).sum())], dtype=np.int64)
    rng = make_rng(seed)
    chunk = 64
    while state[0] > 0 and state[1] < cap:
        u = rng.random(min(chunk, cap - int(state[1])))
        _lazy_steps(class_deg, class_cnt, state, u, cap)
        chunk = min(chunk * 2, 1 << 16)
    t_ne2 = int(state[2]) if state[2] >= 0 else None
    t_cycle = int(state[3]) if state[3] >= 0 else None
    assert t_ne2 is None or t_ne2 != t_cycle
    return ExplorationTrace(start, int(state[1]), t_ne2, t_cycle,
                            _outcome(t_ne2, t_cycle, state[0] > 0), int(state[4]), int(state[5]))


def vertices_of_degree(seq: DegreeSequence, degree: int) -> np.ndarray:
    return np.flatnonzero(seq.degrees == degree)


def pick_start(seq: DegreeSequence, degree: int, rng: np.random.Generator) -> int:
    """Uniform vertex among those of the given degree."""
    pool = vertices_of_degree(seq, degree)
    if pool.size == 0:
        raise InvalidDegree(f"no vertex of degree {degree}")
    return int(pool[rng.integers(pool.size)])


def explore_lazy_batch(seq: DegreeSequence, start: int, seeds: Iterable[int],
                       cap: int | None = None) -> Iterator[ExplorationTrace]:
    for s in seeds:
        yield explore_lazy(seq, start, s, cap)
