"""Finite metric spaces: validation, balls, set distances, doubling constant.

Balls are open, ``B(x, r) = {y : d(x, y) < r}``, throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import (
    Asymmetric,
    MalformedInput,
    NegativeOrNaN,
    NonzeroDiagonal,
    TriangleViolation,
    ZeroOffDiagonal,
)

__all__ = [
    "FiniteMetricSpace",
    "SubsetMask",
    "validate_metric",
    "from_points",
    "open_ball",
    "dist_to_set",
    "doubling_constant",
    "doubling_report",
    "EXACT_DOUBLING_LIMIT",
]

EXACT_DOUBLING_LIMIT = 64

# Relative slack for the triangle check only; distances derived from
# coordinates carry sqrt rounding.
TRIANGLE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A validated finite metric space.

    Use :func:`validate_metric` or :func:`from_points` to build one; the
    constructor itself does no checking.

    Parameters
    ----------
    dist : ndarray, shape (n, n)
        Pairwise distances. Stored read-only.
    labels : sequence, optional
        Point identifiers, purely informational.
    """

    dist: np.ndarray
    labels: Optional[tuple] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        d = np.array(self.dist, dtype=np.float64, copy=True)
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    @property
    def min_positive_distance(self) -> float:
        """Smallest nonzero distance; ``inf`` when there are fewer than two points."""
        if "minpos" not in self._cache:
            if self.n < 2:
                val = float("inf")
            else:
                iu = np.triu_indices(self.n, 1)
                val = float(self.dist[iu].min())
            self._cache["minpos"] = val
        return self._cache["minpos"]

    @property
    def realized_distances(self) -> np.ndarray:
        """Sorted distinct positive pairwise distances."""
        if "realized" not in self._cache:
            iu = np.triu_indices(self.n, 1)
            vals = np.unique(self.dist[iu])
            vals.setflags(write=False)
            self._cache["realized"] = vals
        return self._cache["realized"]

    def diam(self, subset) -> float:
        """Diameter of a subset (0 for empty or singleton subsets)."""
        idx = _as_indices(subset, self.n)
        if idx.size < 2:
            return 0.0
        return float(self.dist[np.ix_(idx, idx)].max())

    def subset(self, members) -> "SubsetMask":
        return SubsetMask.from_any(members, self.n)


@dataclass(frozen=True, eq=False)
class SubsetMask:
    """Membership flags of a subset ``E`` of a finite space."""

    member: np.ndarray

    def __post_init__(self):
        m = np.array(self.member, dtype=bool, copy=True).ravel()
        m.setflags(write=False)
        object.__setattr__(self, "member", m)

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "SubsetMask":
        m = np.zeros(n, dtype=bool)
        idx = np.asarray(list(indices), dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise IndexError(f"subset index out of range for a space of size {n}")
        m[idx] = True
        return cls(m)

    @classmethod
    def from_any(cls, members, n: int) -> "SubsetMask":
        if isinstance(members, SubsetMask):
            if members.n != n:
                raise ValueError(f"mask length {members.n} != space size {n}")
            return members
        arr = np.asarray(members)
        if arr.dtype == bool:
            if arr.shape != (n,):
                raise ValueError(f"mask length {arr.shape} != space size {n}")
            return cls(arr)
        return cls.from_indices(arr.ravel().tolist(), n)

    @property
    def n(self) -> int:
        return self.member.shape[0]

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.member)

    def complement(self) -> "SubsetMask":
        return SubsetMask(~self.member)

    def __len__(self):
        return int(self.member.sum())

    def __eq__(self, other):
        if not isinstance(other, SubsetMask):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.member, other.member))

    def __hash__(self):
        return hash(self.member.tobytes())


def _as_indices(subset, n: int) -> np.ndarray:
    if isinstance(subset, SubsetMask):
        return subset.indices
    arr = np.asarray(subset)
    if arr.dtype == bool:
        return np.flatnonzero(arr)
    return np.asarray(arr, dtype=np.intp).ravel()


def validate_metric(raw, labels: Optional[Sequence] = None) -> FiniteMetricSpace:
    """Validate a raw distance matrix and wrap it.

    Checks run in a fixed order (finite/nonnegative, zero diagonal,
    symmetry, positive off-diagonal, triangle inequality) and the first
    failing pair or triple, in lexicographic index order, is raised.

    Raises
    ------
    MalformedInput
        Not a square 2-D array of finite numbers.
    NegativeOrNaN, NonzeroDiagonal, Asymmetric, ZeroOffDiagonal, TriangleViolation
        The corresponding axiom fails; ``exc.indices`` names the witness.
    """
    try:
        d = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"not a numeric matrix: {exc}") from None
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MalformedInput(f"expected a square matrix, got shape {d.shape}")
    n = d.shape[0]
    if n == 0:
        raise MalformedInput("empty matrix")

    bad = ~np.isfinite(d) | (d < 0)
    if bad.any():
        raise NegativeOrNaN(*np.argwhere(bad)[0])
    diag = np.flatnonzero(np.diag(d) != 0)
    if diag.size:
        raise NonzeroDiagonal(diag[0])
    asym = np.argwhere(d != d.T)
    if asym.size:
        i, j = asym[0]
        raise Asymmetric(min(i, j), max(i, j))
    zero = np.argwhere((d == 0) & ~np.eye(n, dtype=bool))
    if zero.size:
        raise ZeroOffDiagonal(*zero[0])

    tol = TRIANGLE_RTOL * float(d.max())
    for i in range(n):
        # viol[j, k]: d[i, k] > d[i, j] + d[j, k]
        viol = d[i][None, :] > d[i][:, None] + d + tol
        if viol.any():
            j, k = np.argwhere(viol)[0]
            raise TriangleViolation(i, j, k)
    return FiniteMetricSpace(d, labels=None if labels is None else tuple(labels))


def from_points(points, metric: str = "euclidean", labels=None) -> FiniteMetricSpace:
    """Build a validated space from coordinates (one point per row)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    d = cdist(pts, pts, metric=metric)
    d = np.minimum(d, d.T)  # exact symmetry
    np.fill_diagonal(d, 0.0)
    return validate_metric(d, labels=labels)


def open_ball(space: FiniteMetricSpace, x: int, r: float) -> np.ndarray:
    """Indices ``y`` with ``d(x, y) < r``, ascending."""
    return np.flatnonzero(space.dist[x] < r)


def dist_to_set(space: FiniteMetricSpace, x: int, S) -> float:
    """``min_{s in S} d(x, s)``, or ``inf`` for empty ``S``."""
    idx = _as_indices(S, space.n)
    if idx.size == 0:
        return float("inf")
    return float(space.dist[x, idx].min())


def margins(space: FiniteMetricSpace, member: np.ndarray) -> np.ndarray:
    """Vector of ``dist(x, X \\ F)`` for every ``x`` (``inf`` if ``F = X``)."""
    outside = ~np.asarray(member, dtype=bool)
    if not outside.any():
        return np.full(space.n, np.inf)
    return space.dist[:, outside].min(axis=1)


# -- doubling constant ------------------------------------------------------

def _critical_radii(space: FiniteMetricSpace) -> np.ndarray:
    d = space.realized_distances
    return np.unique(np.concatenate([d, 2.0 * d]))


def _masks(rows: np.ndarray) -> list:
    """Boolean rows -> python int bitmasks."""
    weights = [1 << i for i in range(rows.shape[1])]
    return [sum(w for w, b in zip(weights, row) if b) for row in rows]


def _greedy_cover(universe: int, sets: list) -> int:
    left, count = universe, 0
    while left:
        best = max(sets, key=lambda s: bin(s & left).count("1"))
        left &= ~best
        count += 1
    return count


def _coverable(universe: int, sets: list, budget: int) -> bool:
    if universe == 0:
        return True
    if budget == 0:
        return False
    low = universe & -universe
    for s in sets:
        if s & low and _coverable(universe & ~s, sets, budget - 1):
            return True
    return False


def _reduced_sets(universe: int, raw: list) -> list:
    sets = sorted({s & universe for s in raw if s & universe}, key=lambda s: -bin(s).count("1"))
    # drop sets strictly contained in another
    return [s for i, s in enumerate(sets)
            if not any(t != s and (s & t) == s for t in sets[:i])]


def doubling_report(space: FiniteMetricSpace, exact: Optional[bool] = None) -> dict:
    """Doubling constant with the mode used to compute it.

    Every ball ``B(x, r)``, ``r`` ranging over realized distances and their
    doubles, is covered by balls ``B(c, r/2)`` with ``c`` in ``X``. These
    radii suffice: both the ball and the covering family are constant on
    the intervals between consecutive critical values, and open balls take
    their interval value at the right endpoint.

    With ``exact`` (default for ``n <= 64``) the minimum cover of each ball
    is found by branch and bound; otherwise a greedy cover gives an upper
    bound.
    """
    n = space.n
    if exact is None:
        exact = n <= EXACT_DOUBLING_LIMIT
    best, witness = 1, None
    for r in _critical_radii(space):
        balls = space.dist < r
        halves = _masks(space.dist < r / 2)
        seen = set()
        for x, ball in zip(range(n), _masks(balls)):
            if ball in seen:
                continue
            seen.add(ball)
            size = bin(ball).count("1")
            if size <= best:
                continue
            sets = _reduced_sets(ball, halves)
            ub = _greedy_cover(ball, sets)
            if ub <= best:
                continue
            if not exact:
                best, witness = ub, (x, float(r))
                continue
            if _coverable(ball, sets, best):
                continue
            need = best + 1
            while not _coverable(ball, sets, need):
                need += 1
            best, witness = need, (x, float(r))
    return {
        "doubling_constant": best,
        "mode": "exact" if exact else "greedy_upper_bound",
        "witness": None if witness is None else {"x": witness[0], "r": witness[1]},
        "n": n,
    }


def doubling_constant(space: FiniteMetricSpace, exact: Optional[bool] = None) -> int:
    """Least number of half-radius balls needed to cover any ball; see
    :func:`doubling_report`."""
    return doubling_report(space, exact=exact)["doubling_constant"]
