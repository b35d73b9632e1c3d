"""Systems of dyadic points: per-level maximal separated nets.

Plain systems are nested greedy nets.  Adapted systems additionally keep the
centers of each side ``F in {E, X \\ E}`` at distance ``>= b0 delta**k`` from
the other side, from the constrained generation ``m`` on, with exactly one
center inside ``E`` at generation ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import (
    CoveringFailure,
    EmptyEligibleSet,
    EmptySubset,
    HypothesisViolated,
    InvalidParams,
    SideCoveringFailure,
)
from .metric import FiniteMetricSpace, SubsetMask, margins
from .plumpness import DPlumpParams

__all__ = [
    "E_SIDE",
    "COMPLEMENT_SIDE",
    "UNCONSTRAINED",
    "NetParams",
    "DyadicPointSystem",
    "default_levels",
    "build_plain_points",
    "build_adapted_points",
    "verify_point_system",
]

E_SIDE = "E"
COMPLEMENT_SIDE = "complement"
UNCONSTRAINED = "unconstrained"


@dataclass(frozen=True)
class NetParams:
    delta: float
    c0: float
    C0: float
    k_min: int
    k_max: int

    def validate(self, cube_hypothesis: bool = False):
        if not 0 < self.delta < 1:
            raise InvalidParams(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 < self.c0 <= self.C0 or not math.isfinite(self.C0):
            raise InvalidParams(f"need 0 < c0 <= C0 < inf, got c0={self.c0}, C0={self.C0}")
        if int(self.k_min) != self.k_min or int(self.k_max) != self.k_max:
            raise InvalidParams("level bounds must be integers")
        if self.k_min > self.k_max:
            raise InvalidParams(f"k_min={self.k_min} > k_max={self.k_max}")
        if cube_hypothesis and 12 * self.C0 * self.delta > self.c0:
            raise HypothesisViolated(f"12*C0*delta = {12 * self.C0 * self.delta} > c0 = {self.c0}")
        return self

    def separation(self, k: int) -> float:
        return self.c0 * self.delta ** k

    def covering(self, k: int) -> float:
        return self.C0 * self.delta ** k

    @property
    def levels(self) -> range:
        return range(self.k_min, self.k_max + 1)


@dataclass(eq=False)
class DyadicPointSystem:
    """Centers ``x^k_alpha`` per level.

    ``centers[k][alpha]`` is a point index, ascending in ``alpha``;
    ``sides[k][alpha]`` is one of :data:`E_SIDE`, :data:`COMPLEMENT_SIDE`,
    :data:`UNCONSTRAINED`.  Adapted systems also carry the subset, the
    constrained generation ``m`` and ``alpha0``, the index of the unique
    ``E``-side center at generation ``m``.
    """

    params: NetParams
    centers: dict
    sides: dict
    subset: Optional[SubsetMask] = None
    m: Optional[int] = None
    alpha0: Optional[int] = None
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def adapted(self) -> bool:
        return self.m is not None

    @property
    def levels(self) -> range:
        return self.params.levels

    def constrained(self, k: int) -> bool:
        return self.adapted and k >= self.m

    def alpha_of(self, k: int, point: int) -> Optional[int]:
        """Index of ``point`` among the level-``k`` centers, if it is one."""
        if k not in self._index:
            self._index[k] = {int(p): a for a, p in enumerate(self.centers[k])}
        return self._index[k].get(int(point))

    def to_dict(self) -> dict:
        p = self.params
        out = {
            "params": {"delta": p.delta, "c0": p.c0, "C0": p.C0,
                       "k_min": p.k_min, "k_max": p.k_max},
            "levels": [
                {"k": k, "centers": [{"point": int(x), "side": s}
                                     for x, s in zip(self.centers[k], self.sides[k])]}
                for k in self.levels
            ],
            "alpha0": self.alpha0,
        }
        if self.adapted:
            out["m"] = self.m
            out["subset"] = [int(i) for i in self.subset.indices]
        return out

    @classmethod
    def from_dict(cls, data: dict, n: int) -> "DyadicPointSystem":
        p = data["params"]
        params = NetParams(float(p["delta"]), float(p["c0"]), float(p["C0"]),
                           int(p["k_min"]), int(p["k_max"]))
        centers, sides = {}, {}
        for lvl in data["levels"]:
            k = int(lvl["k"])
            centers[k] = np.array([c["point"] for c in lvl["centers"]], dtype=np.intp)
            sides[k] = tuple(c["side"] for c in lvl["centers"])
        subset = None
        if data.get("m") is not None:
            subset = SubsetMask.from_indices(data["subset"], n)
        return cls(params, centers, sides, subset=subset, m=data.get("m"),
                   alpha0=data.get("alpha0"))


def default_levels(space: FiniteMetricSpace, delta: float, sep: float, cover: float):
    """``(k_min, k_max)``: the largest ``k`` with ``sep * delta**k`` above the
    diameter (a single root center) and the smallest ``k`` with
    ``cover * delta**k`` below the minimum positive distance (every point a
    center).  A one-point space gets ``(0, 0)``."""
    if space.n < 2:
        return 0, 0
    diam, minpos = space.diameter, space.min_positive_distance
    k_min = math.floor(math.log(diam / sep) / math.log(delta))
    while sep * delta ** k_min <= diam:
        k_min -= 1
    while sep * delta ** (k_min + 1) > diam:
        k_min += 1
    k_max = math.floor(math.log(minpos / cover) / math.log(delta))
    while cover * delta ** k_max >= minpos:
        k_max += 1
    while cover * delta ** (k_max - 1) < minpos:
        k_max -= 1
    return int(k_min), int(max(k_max, k_min))


def _greedy(dist: np.ndarray, seeds, eligible: np.ndarray, sep: float) -> np.ndarray:
    """Maximal ``sep``-separated subset of ``eligible`` containing ``seeds``;
    non-seed points are swept in ascending index order."""
    n = dist.shape[0]
    chosen = list(int(s) for s in seeds)
    nearest = np.full(n, np.inf)
    if chosen:
        nearest = dist[chosen].min(axis=0)
    for x in np.flatnonzero(eligible):
        if nearest[x] >= sep:
            chosen.append(int(x))
            nearest = np.minimum(nearest, dist[x])
    return np.array(sorted(chosen), dtype=np.intp)


def build_plain_points(space: FiniteMetricSpace, params: NetParams) -> DyadicPointSystem:
    """Nested greedy maximal nets, coarse to fine.

    Each level is seeded with the previous level's centers and completed by
    an ascending sweep, so centers persist to every finer level.
    """
    params.validate()
    everyone = np.ones(space.n, dtype=bool)
    centers, sides = {}, {}
    prev = []
    for k in params.levels:
        cur = _greedy(space.dist, prev, everyone, params.separation(k))
        cover = space.dist[cur].min(axis=0)
        bad = np.flatnonzero(cover >= params.covering(k))
        if bad.size:
            raise CoveringFailure(k, bad[0])
        centers[k] = cur
        sides[k] = (UNCONSTRAINED,) * cur.size
        prev = cur
    return DyadicPointSystem(params, centers, sides)


def build_adapted_points(space: FiniteMetricSpace, E, p: DPlumpParams,
                         k_max: Optional[int] = None,
                         k_min: Optional[int] = None) -> DyadicPointSystem:
    """Dyadic points adapted to ``E``.

    For ``k >= m`` each side ``F`` gets a greedy maximal ``b0 delta**k``-
    separated set of points with ``dist(x, X \\ F) >= b0 delta**k``, seeded
    with that side's coarser centers.  At ``k = m`` only the deepest eligible
    point of ``E`` (largest distance to the complement, lowest index on ties)
    is kept on the ``E`` side.  Levels below ``m`` are plain nets.

    Raises
    ------
    EmptySubset
        ``E`` is empty.
    EmptyEligibleSet
        A nonempty side has no point deep enough at generation ``m``.
    SideCoveringFailure
        Some point of a side is not within ``B0 delta**k`` of a same-side
        center; the side is not d-plump with ``p``.
    """
    p.validate()
    mask = SubsetMask.from_any(E, space.n)
    member = mask.member
    if not member.any():
        raise EmptySubset("adapted points need a nonempty subset")
    m = int(p.m)
    auto_min, auto_max = default_levels(space, p.delta, p.b0, p.B0)
    k_max = max(auto_max, m) if k_max is None else int(k_max)
    k_min = min(auto_min, m) if k_min is None else int(k_min)
    if not k_min <= m <= k_max:
        raise InvalidParams(f"need k_min <= m <= k_max, got {k_min}, {m}, {k_max}")
    params = NetParams(p.delta, p.b0, p.B0, k_min, k_max).validate()

    dist = space.dist
    side_masks = {E_SIDE: member, COMPLEMENT_SIDE: ~member}
    depth = {s: margins(space, fm) for s, fm in side_masks.items()}
    centers, sides = {}, {}
    prev = {E_SIDE: [], COMPLEMENT_SIDE: []}
    alpha0 = None
    for k in range(m, k_max + 1):
        sep = params.separation(k)
        per_side = {}
        for side, fm in side_masks.items():
            if not fm.any():
                per_side[side] = np.array([], dtype=np.intp)
                continue
            eligible = fm & (depth[side] >= sep)
            if k == m and not eligible.any():
                raise EmptyEligibleSet(k, side)
            if k == m and side == E_SIDE:
                deepest = np.where(eligible, depth[side], -np.inf)
                per_side[side] = np.array([int(np.argmax(deepest))], dtype=np.intp)
            else:
                per_side[side] = _greedy(dist, prev[side], eligible, sep)
            cover = dist[per_side[side]].min(axis=0)
            bad = np.flatnonzero(fm & (cover >= params.covering(k)))
            if bad.size:
                raise SideCoveringFailure(k, bad[0], side)
        merged = np.concatenate([per_side[E_SIDE], per_side[COMPLEMENT_SIDE]])
        order = np.argsort(merged, kind="stable")
        centers[k] = merged[order]
        sides[k] = tuple(E_SIDE if member[x] else COMPLEMENT_SIDE for x in centers[k])
        if k == m:
            alpha0 = int(np.flatnonzero(centers[k] == per_side[E_SIDE][0])[0])
        prev = per_side

    everyone = np.ones(space.n, dtype=bool)
    seeds = []
    for k in range(k_min, m):
        cur = _greedy(dist, seeds, everyone, params.separation(k))
        centers[k] = cur
        sides[k] = (UNCONSTRAINED,) * cur.size
        seeds = cur
    return DyadicPointSystem(params, centers, sides, subset=mask, m=m, alpha0=alpha0)


def _violation(check, k, alpha=None, beta=None, **extra):
    out = {"check": check, "k": int(k)}
    if alpha is not None:
        out["alpha"] = int(alpha)
    if beta is not None:
        out["beta"] = int(beta)
    out.update(extra)
    return out


def _sort_key(v):
    return (v["k"], v["check"], v.get("alpha", -1), v.get("beta", -1), v.get("x", -1))


def verify_point_system(space: FiniteMetricSpace, sys: DyadicPointSystem) -> dict:
    """Check every invariant of a point system and list the violations.

    Checks: separation and covering at every level; nesting between
    consecutive levels (all levels for plain systems, levels ``>= m`` for
    adapted ones); and for adapted systems at levels ``>= m``, side tags,
    side margins, side-restricted covering and uniqueness of the ``E`` center
    at generation ``m``.  Violations are sorted, so the report is
    deterministic.
    """
    dist = space.dist
    p = sys.params
    out = []
    for k in sys.levels:
        cs = np.asarray(sys.centers[k], dtype=np.intp)
        if cs.size == 0:
            out.append(_violation("covering", k, x=0))
            continue
        sep = p.separation(k)
        sub = dist[np.ix_(cs, cs)]
        close = np.argwhere(np.triu(sub < sep, 1))
        out.extend(_violation("separation", k, a, b) for a, b in close)
        cover = dist[cs].min(axis=0)
        out.extend(_violation("covering", k, x=int(x))
                   for x in np.flatnonzero(cover >= p.covering(k)))
        nested = k > p.k_min and (not sys.adapted or k - 1 >= sys.m)
        if nested:
            fine = set(int(x) for x in cs)
            out.extend(_violation("nesting", k - 1, a, point=int(x))
                       for a, x in enumerate(sys.centers[k - 1]) if int(x) not in fine)
        if not sys.constrained(k):
            continue
        member = sys.subset.member
        for a, (x, side) in enumerate(zip(cs, sys.sides[k])):
            want = E_SIDE if member[x] else COMPLEMENT_SIDE
            if side != want:
                out.append(_violation("side_tag", k, a))
        for side, fm in ((E_SIDE, member), (COMPLEMENT_SIDE, ~member)):
            if not fm.any():
                continue
            own = cs[fm[cs]]
            depth = margins(space, fm)
            out.extend(_violation("side_margin", k, sys.alpha_of(k, x))
                       for x in own if depth[x] < sep)
            cover = dist[own].min(axis=0) if own.size else np.full(space.n, np.inf)
            out.extend(_violation("side_covering", k, x=int(x), side=side)
                       for x in np.flatnonzero(fm & (cover >= p.covering(k))))
        if k == sys.m:
            n_e = int(member[cs].sum())
            if n_e != 1:
                out.append(_violation("unique_e_center", k, count=n_e))
            elif sys.alpha0 is None or not member[cs[sys.alpha0]]:
                out.append(_violation("unique_e_center", k, count=n_e, alpha0=sys.alpha0))
    out.sort(key=_sort_key)
    return {"ok": not out, "violations": out}
