"""Dyadic partial order: parent links between consecutive generations.

Only single-step links are stored.  The order itself, ``(l, beta) <= (k, alpha)``,
holds iff ``l >= k`` and walking parents from ``(l, beta)`` up to level ``k``
lands on ``alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import OrphanChild
from .metric import FiniteMetricSpace
from .nets import DyadicPointSystem

__all__ = ["ParentOrder", "build_order", "verify_order", "descendants"]


@dataclass(eq=False)
class ParentOrder:
    """``parent[k][beta]`` is the level ``k - 1`` parent of ``(k, beta)``,
    for ``k_min < k <= k_max``; ``sizes[k]`` is the number of level-``k``
    indices."""

    k_min: int
    k_max: int
    parent: dict
    sizes: dict
    _anc: dict = field(default_factory=dict, repr=False)

    def ancestor_map(self, level: int, k: int) -> np.ndarray:
        """Array mapping each level-``level`` index to its level-``k`` ancestor."""
        if not self.k_min <= k <= level <= self.k_max:
            raise ValueError(f"need k_min <= k <= level <= k_max, got k={k}, level={level}")
        key = (level, k)
        if key not in self._anc:
            if level == k:
                amap = np.arange(self.sizes[k], dtype=np.intp)
            else:
                amap = self.ancestor_map(level - 1, k)[self.parent[level]]
            amap.setflags(write=False)
            self._anc[key] = amap
        return self._anc[key]

    def leq(self, child: tuple, anc: tuple) -> bool:
        """``(l, beta) <= (k, alpha)``."""
        (l, b), (k, a) = child, anc
        return l >= k and int(self.ancestor_map(l, k)[b]) == a

    def to_dict(self) -> dict:
        edges = [{"child": [k, b], "parent": [k - 1, int(a)]}
                 for k in range(self.k_min + 1, self.k_max + 1)
                 for b, a in enumerate(self.parent[k])]
        sizes = [{"k": k, "size": int(self.sizes[k])} for k in range(self.k_min, self.k_max + 1)]
        return {"k_min": self.k_min, "k_max": self.k_max, "sizes": sizes, "edges": edges}

    @classmethod
    def from_dict(cls, data: dict) -> "ParentOrder":
        k_min, k_max = int(data["k_min"]), int(data["k_max"])
        sizes = {int(s["k"]): int(s["size"]) for s in data["sizes"]}
        parent = {k: np.full(sizes[k], -1, dtype=np.intp) for k in range(k_min + 1, k_max + 1)}
        for e in data["edges"]:
            (k, b), (_, a) = e["child"], e["parent"]
            parent[int(k)][int(b)] = int(a)
        return cls(k_min, k_max, parent, sizes)


def build_order(space: FiniteMetricSpace, sys: DyadicPointSystem) -> ParentOrder:
    """Assign parents generation by generation.

    A child within ``c0 delta**k / 2`` of a level-``k`` center takes it as
    parent (unique by separation).  Otherwise the nearest admissible center
    within ``C0 delta**k`` is used, ties to the lowest index.  Admissible
    means any center, except in adapted systems at ``k >= m`` where it must
    lie on the child's side.

    Raises
    ------
    OrphanChild
        No admissible center within ``C0 delta**k``; cannot happen for a
        system that passes :func:`~dyadic_cubes.nets.verify_point_system`.
    """
    p = sys.params
    dist = space.dist
    parent = {}
    for k in range(p.k_min, p.k_max):
        up = np.asarray(sys.centers[k], dtype=np.intp)
        down = np.asarray(sys.centers[k + 1], dtype=np.intp)
        d = dist[np.ix_(down, up)]
        half = p.separation(k) / 2
        reach = p.covering(k)
        links = np.empty(down.size, dtype=np.intp)
        for b in range(down.size):
            row = d[b]
            close = np.flatnonzero(row < half)
            if close.size:
                links[b] = close[0]
                continue
            ok = row < reach
            if sys.constrained(k):
                ok &= np.array([s == sys.sides[k + 1][b] for s in sys.sides[k]])
            cand = np.flatnonzero(ok)
            if cand.size == 0:
                raise OrphanChild(k + 1, b)
            links[b] = cand[np.argmin(row[cand])]
        parent[k + 1] = links
    return ParentOrder(p.k_min, p.k_max, parent, {k: len(sys.centers[k]) for k in sys.levels})


def descendants(order: ParentOrder, k: int, alpha: int, level: int) -> np.ndarray:
    """All level-``level`` indices ``beta`` with ``(level, beta) <= (k, alpha)``."""
    return np.flatnonzero(order.ancestor_map(level, k) == alpha)


def verify_order(space: FiniteMetricSpace, sys: DyadicPointSystem, order: ParentOrder) -> dict:
    """Check a parent table against its point system.

    Reports: missing or out-of-range parents; children within half the
    separation radius of a center that is not their parent; parents at
    distance ``>= C0 delta**k``; cross-side links in constrained adapted
    levels; and, exhaustively over all level pairs, that the derived relation
    is reflexive, antisymmetric and transitive.
    """
    p = sys.params
    dist = space.dist
    out = []
    for k in range(p.k_min, p.k_max):
        up = np.asarray(sys.centers[k], dtype=np.intp)
        down = np.asarray(sys.centers[k + 1], dtype=np.intp)
        links = np.asarray(order.parent.get(k + 1, []), dtype=np.intp)
        if (order.sizes.get(k + 1) != down.size or links.shape != (down.size,)
                or (links.size and (links.min() < 0 or links.max() >= up.size))):
            out.append({"check": "totality", "k": k + 1})
            continue
        d = dist[np.ix_(down, up)]
        half, reach = p.separation(k) / 2, p.covering(k)
        for b in range(down.size):
            a = links[b]
            for g in np.flatnonzero(d[b] < half):
                if g != a:
                    out.append({"check": "proximity_lower", "k": k + 1, "beta": b, "alpha": int(g)})
            if d[b, a] >= reach:
                out.append({"check": "proximity_upper", "k": k + 1, "beta": b, "alpha": int(a)})
            if sys.constrained(k) and sys.sides[k + 1][b] != sys.sides[k][a]:
                out.append({"check": "same_side", "k": k + 1, "beta": b, "alpha": int(a)})
    if out:
        out.sort(key=lambda v: (v["k"], v["check"], v.get("beta", -1), v.get("alpha", -1)))
        return {"ok": False, "violations": out}

    for k in sys.levels:
        if not np.array_equal(order.ancestor_map(k, k), np.arange(len(sys.centers[k]))):
            out.append({"check": "reflexive", "k": k})
    for j in sys.levels:
        for k in range(j, p.k_max + 1):
            for level in range(k, p.k_max + 1):
                # (level, b) <= (k, a) <= (j, c) must give (level, b) <= (j, c)
                lhs = order.ancestor_map(k, j)[order.ancestor_map(level, k)]
                if not np.array_equal(lhs, order.ancestor_map(level, j)):
                    out.append({"check": "transitive", "k": j, "level": level})
            anc = order.ancestor_map(k, j)
            gap = dist[np.asarray(sys.centers[k]), np.asarray(sys.centers[j])[anc]]
            bound = p.covering(j) / (1 - p.delta)
            out.extend({"check": "chain_distance", "k": j, "level": k, "beta": int(b)}
                       for b in np.flatnonzero(gap >= bound))
    # antisymmetry: (l, b) <= (k, a) and (k, a) <= (l, b) force l = k, and
    # then the reflexive map forces b = a.
    out.sort(key=lambda v: (v["k"], v["check"], v.get("level", -1), v.get("beta", -1)))
    return {"ok": not out, "violations": out}
