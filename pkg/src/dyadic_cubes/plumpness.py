"""Plumpness and its scale-quantized variant, with certificates.

A set ``E`` is *plump* with parameters ``(R, b)`` when every ball
``B(y, r)``, ``y in E``, ``0 < r <= R``, contains a ball ``B(z, b r)`` lying
inside ``E``.  The *d-plump* variant with ``(delta, m, b0, B0)`` asks the same
for the outer radius ``B0 delta**k`` and inner radius ``b0 delta**k``, for
every integer ``k >= m``.

Both conditions quantify over infinitely many radii; on a finite space each
reduces exactly to a finite set of scales (see :func:`check_dplump` and
:func:`check_plump`).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .exceptions import InvalidParams
from .metric import FiniteMetricSpace, SubsetMask, margins

__all__ = [
    "PlumpParams",
    "DPlumpParams",
    "PlumpnessVerdict",
    "check_dplump",
    "check_plump",
    "dplump_failure",
    "weaken_plump_params",
    "plump_to_dplump",
    "dplump_to_plump",
    "resolution_level",
]


@dataclass(frozen=True)
class PlumpParams:
    R: float
    b: float

    def validate(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise InvalidParams(f"R must be a positive finite number, got {self.R}")
        if not 0 < self.b < 1:
            raise InvalidParams(f"b must lie in (0, 1), got {self.b}")
        return self


@dataclass(frozen=True)
class DPlumpParams:
    delta: float
    m: int
    b0: float
    B0: float

    def validate(self):
        if not 0 < self.delta < 1:
            raise InvalidParams(f"delta must lie in (0, 1), got {self.delta}")
        if int(self.m) != self.m:
            raise InvalidParams(f"m must be an integer, got {self.m}")
        if not (0 < self.b0 <= self.B0 and math.isfinite(self.B0)):
            raise InvalidParams(f"need 0 < b0 <= B0 < inf, got b0={self.b0}, B0={self.B0}")
        return self

    def inner(self, k: int) -> float:
        return self.b0 * self.delta ** k

    def outer(self, k: int) -> float:
        return self.B0 * self.delta ** k


@dataclass
class PlumpnessVerdict:
    """Outcome of a plumpness check.

    When ``certified``, ``witnesses`` lists one ``{y, <scale>, z}`` record per
    checked point and scale.  Otherwise ``counterexample`` holds the
    lexicographically smallest failing ``(y, scale)`` together with, for
    every candidate ``z``, the first point of ``B(z, inner)`` that blocks it.
    ``scale_key`` is ``"k"`` for d-plumpness and ``"r"`` for plumpness.
    """

    certified: bool
    params: dict
    scale_key: str
    witnesses: list = field(default_factory=list)
    counterexample: Optional[dict] = None

    def __bool__(self):
        return self.certified

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "kind": "dplump" if self.scale_key == "k" else "plump",
            "params": self.params,
            "witnesses": self.witnesses if self.certified else [],
            "counterexample": self.counterexample,
        }


# -- scale tables -----------------------------------------------------------

def _inner_key(space: FiniteMetricSpace, s: float) -> int:
    """Number of realized distances below ``s``; identifies ``{B(z, s)}_z``."""
    return int(np.searchsorted(space.realized_distances, s, side="left"))


def _reach(space: FiniteMetricSpace, s: float, rows=None, cols=None, cache=True) -> np.ndarray:
    """``reach[y, z] = max{d(y, w) : d(z, w) < s}`` restricted to ``rows x cols``.

    ``B(z, s) subset B(y, S)`` iff ``reach[y, z] < S``.
    """
    d = space.dist
    n = space.n
    key = _inner_key(space, s)
    store = space._cache.setdefault("reach", {})
    if key in store:
        full = store[key]
    elif cache and n <= 600:
        inner = d < s
        full = np.empty((n, n))
        for z in range(n):
            full[:, z] = d[:, inner[z]].max(axis=1)
        if len(store) >= 32:
            store.pop(next(iter(store)))
        store[key] = full
    else:
        full = None
    rows = np.arange(n) if rows is None else rows
    cols = np.arange(n) if cols is None else cols
    if full is not None:
        return full[np.ix_(rows, cols)]
    out = np.empty((rows.size, cols.size))
    inner = d[cols] < s
    drows = d[rows]
    for j in range(cols.size):
        out[:, j] = drows[:, inner[j]].max(axis=1)
    return out


def _blockers(space, member, y, inner_r, outer_r) -> list:
    """For each ``z``: the first point of ``B(z, inner_r)`` outside
    ``B(y, outer_r) & F``."""
    d = space.dist
    bad = ~member | (d[y] >= outer_r)
    out = []
    for z in range(space.n):
        hits = np.flatnonzero((d[z] < inner_r) & bad)
        out.append({"z": z, "blocking": int(hits[0])})
    return out


def resolution_level(space: FiniteMetricSpace, p: DPlumpParams) -> int:
    """Smallest ``k >= m`` with ``b0 delta**k`` below the minimum positive
    distance.  From there on every inner ball is a singleton and ``z = y``
    always works, so checking ``k`` in ``[m, k_res]`` decides all ``k >= m``.
    """
    minpos = space.min_positive_distance
    k = int(p.m)
    while p.inner(k) >= minpos:
        k += 1
    return k


def _dplump_scan(space, member, p, stop_first=False, witnesses=False):
    """Returns (first failing (y, k) or None, witness records)."""
    F = np.flatnonzero(member)
    wit = []
    if F.size == 0:
        return None, wit
    k_res = resolution_level(space, p)
    minpos = space.min_positive_distance
    marg = None
    fails = []
    for k in range(int(p.m), k_res + 1):
        s, S = p.inner(k), p.outer(k)
        if s <= minpos:
            # singleton inner balls: z = y
            if witnesses:
                wit.extend({"y": int(y), "k": k, "z": int(y)} for y in F)
            continue
        if marg is None:
            marg = margins(space, member)
        Z = np.flatnonzero(marg >= s)
        if Z.size == 0:
            fails.append((int(F[0]), k))
            if stop_first:
                break
            continue
        ok_mat = _reach(space, s, rows=F, cols=Z) < S
        ok = ok_mat.any(axis=1)
        if not ok.all():
            fails.append((int(F[np.argmin(ok)]), k))
            if stop_first:
                break
        if witnesses:
            first = Z[np.argmax(ok_mat, axis=1)]
            wit.extend({"y": int(y), "k": k, "z": int(z)}
                       for y, z, good in zip(F, first, ok) if good)
    if fails:
        return min(fails), wit
    wit.sort(key=lambda w: (w["y"], w["k"]))
    return None, wit


def dplump_failure(space: FiniteMetricSpace, E, p: DPlumpParams):
    """First failing ``(y, k)`` or ``None``; the fast path behind
    :func:`check_dplump`, without witness bookkeeping."""
    p.validate()
    member = SubsetMask.from_any(E, space.n).member
    fail, _ = _dplump_scan(space, member, p, stop_first=False)
    return fail


def check_dplump(space: FiniteMetricSpace, E, p: DPlumpParams) -> PlumpnessVerdict:
    """Decide d-plumpness of ``E`` and return a certificate or counterexample.

    Scales ``k`` run over ``[m, k_res]`` (:func:`resolution_level`); beyond
    ``k_res`` the condition holds trivially.  Candidates ``z`` are scanned in
    ascending order and the first success is the witness.

    Raises
    ------
    InvalidParams
        ``p`` violates ``0 < delta < 1`` or ``0 < b0 <= B0``.
    """
    p.validate()
    member = SubsetMask.from_any(E, space.n).member
    fail, wit = _dplump_scan(space, member, p, witnesses=True)
    params = {"delta": p.delta, "m": int(p.m), "b0": p.b0, "B0": p.B0}
    if fail is None:
        return PlumpnessVerdict(True, params, "k", witnesses=wit)
    y, k = fail
    cex = {"y": y, "k": k, "inner_radius": p.inner(k), "outer_radius": p.outer(k),
           "rejected": _blockers(space, member, y, p.inner(k), p.outer(k))}
    return PlumpnessVerdict(False, params, "k", counterexample=cex)


def critical_scales(space: FiniteMetricSpace, p: PlumpParams) -> list:
    """Pairs ``(r, inner radius)`` sufficient to decide plumpness.

    ``B(y, r)`` only changes when ``r`` crosses a realized distance and
    ``B(z, b r)`` only when ``b r`` does; on each interval between such
    values the condition is hardest at the right endpoint, where open balls
    still take their interval value.  The endpoints are ``d``, ``d / b`` and
    ``R``.  For ``r = d / b`` the inner radius is taken as ``d`` itself, not
    the rounded product ``b * (d / b)``.
    """
    R, b = p.R, p.b
    d = space.realized_distances
    pairs = {(float(v), b * float(v)) for v in d[d <= R]}
    pairs |= {(float(v) / b, float(v)) for v in d if float(v) / b <= R}
    pairs.add((R, b * R))
    return sorted(pairs)


def check_plump(space: FiniteMetricSpace, E, p: PlumpParams) -> PlumpnessVerdict:
    """Decide plumpness of ``E`` with parameters ``(R, b)``.

    Radii are the finite critical set of :func:`critical_scales`; the
    decision is exact, not sampled.
    """
    p.validate()
    member = SubsetMask.from_any(E, space.n).member
    params = {"R": p.R, "b": p.b}
    F = np.flatnonzero(member)
    if F.size == 0:
        return PlumpnessVerdict(True, params, "r")
    pairs = critical_scales(space, p)
    marg = margins(space, member)
    groups = {}
    for r, s in pairs:
        groups.setdefault(_inner_key(space, s), []).append((r, s))
    wit = []
    fail = None
    for key in sorted(groups):
        grp = groups[key]
        if key == 0:
            wit.extend({"y": int(y), "r": r, "z": int(y)} for r, _ in grp for y in F)
            continue
        s = grp[0][1]
        Z = np.flatnonzero(marg >= s)
        if Z.size == 0:
            cand = (int(F[0]), grp[0][0], grp[0][1])
            fail = cand if fail is None else min(fail, cand)
            continue
        reach = _reach(space, s, rows=F, cols=Z, cache=False)
        for r, s in grp:
            ok_mat = reach < r
            ok = ok_mat.any(axis=1)
            if not ok.all():
                cand = (int(F[np.argmin(ok)]), r, s)
                fail = cand if fail is None else min(fail, cand)
            if fail is None:
                first = Z[np.argmax(ok_mat, axis=1)]
                wit.extend({"y": int(y), "r": r, "z": int(z)} for y, z in zip(F, first))
    if fail is None:
        wit.sort(key=lambda w: (w["y"], w["r"]))
        return PlumpnessVerdict(True, params, "r", witnesses=wit)
    y, r, s = fail
    cex = {"y": y, "r": r, "inner_radius": s, "outer_radius": r,
           "rejected": _blockers(space, member, y, s, r)}
    return PlumpnessVerdict(False, params, "r", counterexample=cex)


# -- parameter transport ----------------------------------------------------

def weaken_plump_params(p: PlumpParams, q: PlumpParams) -> bool:
    """Whether plumpness with ``p`` implies plumpness with ``q``: either both
    parameters shrink, or ``R`` grows while ``R * b`` does not."""
    p.validate()
    q.validate()
    return (q.R <= p.R and q.b <= p.b) or (q.R >= p.R and q.R * q.b <= p.R * p.b)


def plump_to_dplump(p: PlumpParams, delta: float) -> DPlumpParams:
    """Canonical d-plump parameters implied by plumpness with ``p``:
    ``B0 = 1``, ``b0 = b`` and the least ``m`` with ``delta**m <= R``."""
    p.validate()
    if not 0 < delta < 1:
        raise InvalidParams(f"delta must lie in (0, 1), got {delta}")
    m = math.ceil(math.log(p.R) / math.log(delta))
    while delta ** m > p.R:
        m += 1
    while delta ** (m - 1) <= p.R:
        m -= 1
    return DPlumpParams(delta=delta, m=int(m), b0=p.b, B0=1.0)


def dplump_to_plump(p: DPlumpParams) -> PlumpParams:
    """Extremal plump parameters implied by d-plumpness:
    ``b = delta * b0 / B0`` and ``R = B0 * delta**(m - 1)``."""
    p.validate()
    return PlumpParams(R=p.B0 * p.delta ** (p.m - 1), b=p.delta * p.b0 / p.B0)


def params_dict(p) -> dict:
    return asdict(p)
