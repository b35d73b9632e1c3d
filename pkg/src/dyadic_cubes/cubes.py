"""Cube systems built from dyadic points and a parent order.

On a finite space the construction is exact once the finest level contains
every point as a center: a cube is the set of leaves below it, its closure
is the set of all centers below it, and its open part is what the closures
of its siblings leave uncovered.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import HypothesisViolated, IncompleteLeaves
from .metric import FiniteMetricSpace
from .nets import DyadicPointSystem
from .order import ParentOrder

__all__ = [
    "CubeParams",
    "CubeSystem",
    "build_cube_system",
    "verify_cube_system",
    "locate",
    "EXHAUSTIVE_LIMIT",
]

EXHAUSTIVE_LIMIT = 2000
ELIDE_ABOVE = 5000


@dataclass(frozen=True)
class CubeParams:
    delta: float
    c1: float
    C1: float

    @classmethod
    def from_net(cls, delta: float, c0: float, C0: float) -> "CubeParams":
        return cls(delta, c0 / 3, 2 * C0)

    def inner(self, k: int) -> float:
        return self.c1 * self.delta ** k

    def outer(self, k: int) -> float:
        return self.C1 * self.delta ** k


@dataclass(eq=False)
class CubeSystem:
    """Per-level cubes.

    ``members[k][alpha]``, ``closed[k][alpha]`` and ``open[k][alpha]`` are
    ascending point-index arrays; ``centers[k][alpha]`` is the center point.
    ``resolution`` is ``"full"`` when every point is a finest-level center
    and ``"capped"`` otherwise.
    """

    params: CubeParams
    k_min: int
    k_max: int
    centers: dict
    members: dict
    closed: dict
    open: dict
    n: int
    resolution: str = "full"

    @property
    def levels(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def labels(self, k: int) -> np.ndarray:
        """Cube index of every point at level ``k`` (-1 if uncovered)."""
        out = np.full(self.n, -1, dtype=np.intp)
        for a, mem in enumerate(self.members[k]):
            out[mem] = a
        return out

    def cube(self, k: int, alpha: int) -> np.ndarray:
        return self.members[k][alpha]

    def to_dict(self, elide_above: int = ELIDE_ABOVE) -> dict:
        p = self.params
        levels = []
        for k in self.levels:
            cubes = []
            for a, c in enumerate(self.centers[k]):
                entry = {"alpha": a, "center": int(c)}
                for name, sets in (("members", self.members), ("closed", self.closed),
                                   ("open", self.open)):
                    pts = [int(i) for i in sets[k][a]]
                    if len(pts) > elide_above:
                        entry[name] = {"elided": True, "size": len(pts), "digest": _digest(pts)}
                    else:
                        entry[name] = pts
                cubes.append(entry)
            levels.append({"k": k, "cubes": cubes})
        return {"params": {"delta": p.delta, "c1": p.c1, "C1": p.C1},
                "resolution": self.resolution, "n": self.n, "levels": levels}

    @classmethod
    def from_dict(cls, data: dict) -> "CubeSystem":
        p = data["params"]
        centers, members, closed, opened = {}, {}, {}, {}
        for lvl in data["levels"]:
            k = int(lvl["k"])
            cubes = sorted(lvl["cubes"], key=lambda c: c["alpha"])
            centers[k] = np.array([c["center"] for c in cubes], dtype=np.intp)
            for name, store in (("members", members), ("closed", closed), ("open", opened)):
                if any(isinstance(c[name], dict) for c in cubes):
                    raise ValueError(f"level {k}: elided {name} cannot be re-verified")
                store[k] = [np.array(c[name], dtype=np.intp) for c in cubes]
        ks = sorted(centers)
        return cls(CubeParams(float(p["delta"]), float(p["c1"]), float(p["C1"])),
                   ks[0], ks[-1], centers, members, closed, opened, int(data["n"]),
                   data.get("resolution", "full"))


def _digest(values) -> str:
    return hashlib.sha256(json.dumps(values, separators=(",", ":")).encode()).hexdigest()


def _groups(labels: np.ndarray, size: int) -> list:
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(size + 1))
    return [np.sort(order[bounds[a]:bounds[a + 1]]) for a in range(size)]


def build_cube_system(space: FiniteMetricSpace, sys: DyadicPointSystem, order: ParentOrder,
                      require_full: bool = True) -> CubeSystem:
    """Materialize cubes with ``c1 = c0 / 3`` and ``C1 = 2 C0``.

    ``members[k][alpha]`` holds the leaves below ``(k, alpha)``;
    ``closed`` the centers of every generation below it; ``open`` the points
    outside the closures of the other level-``k`` cubes.

    With ``require_full=False`` and a finest level missing some points, each
    missing point is attached to its nearest finest-level center (lowest
    index on ties; same side only when that level is constrained), counts as a leaf of that center (so it also enters the
    closures), and ``resolution`` is ``"capped"``; the cube axioms are then
    not guaranteed and should be verified.

    Raises
    ------
    HypothesisViolated
        ``12 C0 delta > c0``.
    IncompleteLeaves
        Some point is not a finest-level center and ``require_full`` is set.
    """
    p = sys.params
    if 12 * p.C0 * p.delta > p.c0:
        raise HypothesisViolated(f"12*C0*delta = {12 * p.C0 * p.delta} > c0 = {p.c0}")
    n = space.n
    leaves = np.asarray(sys.centers[p.k_max], dtype=np.intp)
    leaf_of = np.full(n, -1, dtype=np.intp)
    leaf_of[leaves] = np.arange(leaves.size)
    resolution = "full"
    missing = np.flatnonzero(leaf_of < 0)
    if missing.size:
        if require_full:
            raise IncompleteLeaves(
                f"{missing.size} points are not centers at k_max={p.k_max}; refine k_max")
        resolution = "capped"
        d = space.dist[np.ix_(missing, leaves)]
        if sys.constrained(p.k_max):
            # same-side attachment, as in the adapted order
            inside = sys.subset.member
            d = np.where(inside[missing][:, None] == inside[leaves][None, :], d, np.inf)
        leaf_of[missing] = np.argmin(d, axis=1)

    centers, members, closed, opened = {}, {}, {}, {}
    for k in sys.levels:
        size = len(sys.centers[k])
        centers[k] = np.asarray(sys.centers[k], dtype=np.intp)
        members[k] = _groups(order.ancestor_map(p.k_max, k)[leaf_of], size)
        hull = np.zeros((size, n), dtype=bool)
        for level in range(k, p.k_max + 1):
            hull[order.ancestor_map(level, k), np.asarray(sys.centers[level])] = True
        # attached points act as leaves; a no-op at full resolution
        for a, mem in enumerate(members[k]):
            hull[a, mem] = True
        closed[k] = [np.flatnonzero(row) for row in hull]
        count = hull.sum(axis=0)
        opened[k] = [np.flatnonzero(count - row == 0) for row in hull]
    return CubeSystem(CubeParams.from_net(p.delta, p.c0, p.C0), p.k_min, p.k_max,
                      centers, members, closed, opened, n, resolution)


def locate(cubes: CubeSystem, x: int, k: int) -> int:
    """Index of the level-``k`` cube containing point ``x``."""
    for a, mem in enumerate(cubes.members[k]):
        i = np.searchsorted(mem, x)
        if i < mem.size and mem[i] == x:
            return a
    raise ValueError(f"point {x} lies in no level-{k} cube")


def _matrix(sets: list, n: int) -> np.ndarray:
    out = np.zeros((len(sets), n), dtype=bool)
    for a, s in enumerate(sets):
        out[a, s] = True
    return out


def verify_cube_system(space: FiniteMetricSpace, cubes: CubeSystem,
                       exhaustive: Optional[bool] = None) -> dict:
    """Check the cube axioms and list every violation.

    Families checked: ``partition`` (each level is a disjoint cover),
    ``nesting`` (a finer cube lies inside or outside each coarser one),
    ``inner_ball`` / ``outer_ball`` (``B(x, c1 d^k) <= Q <= B(x, C1 d^k)``),
    ``ball_monotone`` (nested cubes have nested outer balls),
    ``open_closed`` (open part <= cube <= closure) and ``closed_outer_ball``
    (closure inside the outer ball).

    Level pairs are all checked when ``n <= 2000`` (or ``exhaustive`` is
    set); otherwise only consecutive levels and ``(k_min, k_max)``, and the
    report's ``mode`` says so.
    """
    n, p, dist = space.n, cubes.params, space.dist
    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_LIMIT
    out = []
    mats, outer = {}, {}
    for k in cubes.levels:
        cs = np.asarray(cubes.centers[k], dtype=np.intp)
        M = _matrix(cubes.members[k], n)
        mats[k] = M
        count = M.sum(axis=0)
        out.extend({"check": "partition", "k": k, "x": int(x), "count": int(count[x])}
                   for x in np.flatnonzero(count != 1))
        inner = dist[cs] < p.inner(k)
        outer[k] = dist[cs] < p.outer(k)
        for a in range(cs.size):
            if (inner[a] & ~M[a]).any():
                out.append({"check": "inner_ball", "k": k, "alpha": a})
            if (M[a] & ~outer[k][a]).any():
                out.append({"check": "outer_ball", "k": k, "alpha": a})
            closed = np.zeros(n, dtype=bool)
            closed[cubes.closed[k][a]] = True
            opened = np.zeros(n, dtype=bool)
            opened[cubes.open[k][a]] = True
            if (opened & ~M[a]).any() or (M[a] & ~closed).any():
                out.append({"check": "open_closed", "k": k, "alpha": a})
            if (closed & ~outer[k][a]).any():
                out.append({"check": "closed_outer_ball", "k": k, "alpha": a})

    levels = list(cubes.levels)
    if exhaustive:
        pairs = [(k, l) for i, k in enumerate(levels) for l in levels[i + 1:]]
    else:
        pairs = sorted({(k, k + 1) for k in levels[:-1]} | {(levels[0], levels[-1])})
        pairs = [(k, l) for k, l in pairs if k < l]
    for k, l in pairs:
        Mk, Ml = mats[k], mats[l]
        inter = Ml.astype(np.float64) @ Mk.T.astype(np.float64)
        size = Ml.sum(axis=1)[:, None]
        for b, a in np.argwhere((inter > 0) & (inter < size)):
            out.append({"check": "nesting", "k": k, "alpha": int(a), "level": l, "beta": int(b)})
        for b, a in np.argwhere((inter == size) & (size > 0)):
            if (outer[l][b] & ~outer[k][a]).any():
                out.append({"check": "ball_monotone", "k": k, "alpha": int(a),
                            "level": l, "beta": int(b)})
    out.sort(key=lambda v: (v["k"], v["check"], v.get("alpha", -1), v.get("level", -1),
                            v.get("beta", -1), v.get("x", -1)))
    return {"ok": not out, "violations": out,
            "mode": "exhaustive" if exhaustive else "partial",
            "level_pairs": len(pairs)}
