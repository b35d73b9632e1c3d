"""Which subsets are dyadic cubes: both directions as executable pipelines.

Forward: every cube ``Q`` of generation ``m`` in a system with parameters
``(delta, c1, C1)`` has both ``Q`` and ``X \\ Q`` d-plump with
``(delta, m, c1, c1 + C1)``.

Converse: if ``E`` and ``X \\ E`` are d-plump with ``(delta, m, b0, B0)``,
``diam E <= B0 delta**m`` and ``12 B0 delta <= b0``, adapted points and an
adapted order produce a system with ``c1 = b0 / 3``, ``C1 = 2 B0`` in which
``E`` is the generation-``m`` cube around the unique ``E``-side center.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cubes import CubeParams, CubeSystem, build_cube_system, verify_cube_system
from .exceptions import (
    EmptySubset,
    InvalidParams,
    NoFeasibleB0,
    SideCoveringFailure,
)
from .io import ordered_map
from .metric import FiniteMetricSpace, SubsetMask
from .nets import DyadicPointSystem, build_adapted_points, verify_point_system
from .order import ParentOrder, build_order, verify_order
from .plumpness import (
    DPlumpParams,
    PlumpParams,
    PlumpnessVerdict,
    check_dplump,
    dplump_failure,
    resolution_level,
)

__all__ = [
    "CubeCandidateCert",
    "cube_plumpness_params",
    "verify_all_cubes_plump",
    "certify_cube_candidate",
    "auto_params",
    "STAGES",
]

STAGES = ("plumpness", "constraints", "points", "order", "cubes", "match")


def cube_plumpness_params(p: CubeParams, m: int, cube_diam: float):
    """Plumpness parameters every generation-``m`` cube satisfies.

    Returns ``(DPlumpParams(delta, m, c1, c1 + C1), PlumpParams(R, b))``
    with ``b = delta c1 / (c1 + C1)`` and
    ``R = (c1 + C1) / (2 delta C1) * cube_diam``.  ``R`` is 0 for a
    singleton cube, in which case only the d-plump form is meaningful.
    """
    B0 = p.c1 + p.C1
    dp = DPlumpParams(delta=p.delta, m=int(m), b0=p.c1, B0=B0)
    pp = PlumpParams(R=B0 / (2 * p.delta * p.C1) * cube_diam, b=p.delta * p.c1 / B0)
    return dp, pp


def verify_all_cubes_plump(space: FiniteMetricSpace, cubes: CubeSystem) -> dict:
    """d-plumpness of every cube and of its complement, with the parameters
    of :func:`cube_plumpness_params`.  Failures are listed; none are
    expected."""
    def one(job):
        k, a, mem = job
        dp, _ = cube_plumpness_params(cubes.params, k, space.diam(mem))
        inside = np.zeros(space.n, dtype=bool)
        inside[mem] = True
        found = []
        for side, mask in (("cube", inside), ("complement", ~inside)):
            fail = dplump_failure(space, mask, dp)
            if fail is not None:
                found.append({"k": k, "alpha": a, "side": side, "y": fail[0], "scale": fail[1]})
        return found

    jobs = [(k, a, mem) for k in cubes.levels for a, mem in enumerate(cubes.members[k])]
    failures = [f for found in ordered_map(one, jobs) for f in found]
    checked = 2 * len(jobs)
    return {"ok": not failures, "checked": checked, "failures": failures}


@dataclass
class CubeCandidateCert:
    """Certificate that ``E`` is (or is not) a dyadic cube.

    ``accepted`` holds iff both sides are d-plump, both constraints hold and
    the generation-``m`` cube at ``alpha0`` sandwiches ``E``.  A rejected
    certificate names the first failing stage in ``failed_stage`` and carries
    the evidence in ``witness``.
    """

    subset: SubsetMask
    params: DPlumpParams
    constraints: dict = field(default_factory=dict)
    dplump_E: Optional[PlumpnessVerdict] = None
    dplump_complement: Optional[PlumpnessVerdict] = None
    system: Optional[DyadicPointSystem] = None
    order: Optional[ParentOrder] = None
    cubes: Optional[CubeSystem] = None
    cube: Optional[tuple] = None
    match: Optional[dict] = None
    reports: dict = field(default_factory=dict)
    failed_stage: Optional[str] = None
    witness: Optional[dict] = None

    @property
    def accepted(self) -> bool:
        return self.failed_stage is None and self.match is not None and self.match["holds"]

    def _reject(self, stage, witness):
        self.failed_stage = stage
        self.witness = witness
        return self

    def to_dict(self) -> dict:
        p = self.params
        body = {
            "accepted": self.accepted,
            "failed_stage": self.failed_stage,
            "witness": self.witness,
            "subset": [int(i) for i in self.subset.indices],
            "params": {"delta": p.delta, "m": int(p.m), "b0": p.b0, "B0": p.B0},
            "constraints": self.constraints,
            "dplump_E": None if self.dplump_E is None else self.dplump_E.to_dict(),
            "dplump_complement": (None if self.dplump_complement is None
                                  else self.dplump_complement.to_dict()),
            "points": None if self.system is None else self.system.to_dict(),
            "order": None if self.order is None else self.order.to_dict(),
            "cube_system": None if self.cubes is None else self.cubes.to_dict(),
            "cube": None if self.cube is None else {"k": self.cube[0], "alpha": self.cube[1]},
            "match": self.match,
            "reports": self.reports,
        }
        body["digest"] = digest(body)
        return body


def digest(body: dict) -> str:
    """SHA-256 of the canonical JSON encoding (sorted keys, no spaces)."""
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(blob.encode()).hexdigest()


def _constraints(space, member, p):
    diam = space.diam(member)
    level = p.outer(p.m)
    return {
        "diam_E": diam,
        "diam_bound": level,
        "diam_ok": bool(diam <= level),
        "separation_lhs": 12 * p.B0 * p.delta,
        "separation_rhs": p.b0,
        "separation_ok": bool(12 * p.B0 * p.delta <= p.b0),
    }


def certify_cube_candidate(space: FiniteMetricSpace, E, p: DPlumpParams,
                           k_max: Optional[int] = None) -> CubeCandidateCert:
    """Run the converse pipeline on ``E`` and return its certificate.

    Stages: d-plumpness of both sides, the two parameter constraints,
    adapted points, adapted order, cube system, and the final sandwich check of ``E`` against the
    generation-``m`` cube.  Stage failures are recorded in the certificate,
    never raised.  At full leaf resolution the sandwich collapses to
    ``cube == E``; with ``k_max`` capped below it the two inclusions are
    checked against the closure and open part instead.

    Raises
    ------
    EmptySubset
        ``E`` is empty.
    InvalidParams
        ``p`` is malformed.
    """
    p.validate()
    mask = SubsetMask.from_any(E, space.n)
    member = mask.member
    if not member.any():
        raise EmptySubset("a cube always contains a ball, so E must be nonempty")
    cert = CubeCandidateCert(subset=mask, params=p)

    # Constraints and plumpness are both evaluated; a plumpness
    # counterexample outranks a constraint failure as the witness because it
    # does not depend on the parameter choice.
    cert.constraints = _constraints(space, member, p)
    cert.dplump_E = check_dplump(space, member, p)
    cert.dplump_complement = check_dplump(space, ~member, p)
    for side, verdict in (("E", cert.dplump_E), ("complement", cert.dplump_complement)):
        if not verdict.certified:
            cex = verdict.counterexample
            return cert._reject("plumpness", {"side": side, "y": cex["y"], "k": cex["k"]})
    if not cert.constraints["diam_ok"]:
        return cert._reject("constraints", {"constraint": "diam(E) <= B0*delta**m",
                                            "lhs": cert.constraints["diam_E"],
                                            "rhs": cert.constraints["diam_bound"]})
    if not cert.constraints["separation_ok"]:
        return cert._reject("constraints", {"constraint": "12*B0*delta <= b0",
                                            "lhs": cert.constraints["separation_lhs"],
                                            "rhs": cert.constraints["separation_rhs"]})

    try:
        cert.system = build_adapted_points(space, mask, p, k_max=k_max)
    except SideCoveringFailure as exc:
        return cert._reject("points", exc.to_dict())
    cert.reports["points"] = verify_point_system(space, cert.system)
    if not cert.reports["points"]["ok"]:
        return cert._reject("points", cert.reports["points"]["violations"][0])

    cert.order = build_order(space, cert.system)
    cert.reports["order"] = verify_order(space, cert.system, cert.order)
    if not cert.reports["order"]["ok"]:
        return cert._reject("order", cert.reports["order"]["violations"][0])

    cert.cubes = build_cube_system(space, cert.system, cert.order, require_full=False)
    cert.reports["cubes"] = verify_cube_system(space, cert.cubes)
    if not cert.reports["cubes"]["ok"]:
        return cert._reject("cubes", cert.reports["cubes"]["violations"][0])

    m, a0 = int(p.m), cert.system.alpha0
    cert.cube = (m, a0)
    cube = set(int(i) for i in cert.cubes.members[m][a0])
    closed = set(int(i) for i in cert.cubes.closed[m][a0])
    opened = set(int(i) for i in cert.cubes.open[m][a0])
    target = set(int(i) for i in mask.indices)
    full = cert.cubes.resolution == "full"
    lower, upper = opened <= target, target <= closed
    cert.match = {
        "mode": "equality" if full else "inclusions",
        "resolution": cert.cubes.resolution,
        "cube_equals_E": cube == target,
        "open_in_E": lower,
        "E_in_closed": upper,
        "holds": bool((cube == target and lower and upper) if full else (lower and upper)),
    }
    if not cert.match["holds"]:
        return cert._reject("match", {"extra": sorted(cube - target),
                                      "missing": sorted(target - cube)})
    return cert


def _b0_candidates(space, delta, lo, hi, k_hi) -> list:
    d = space.realized_distances
    vals = {hi, lo}
    for k in range(0, k_hi + 1):
        scaled = d / delta ** k
        vals.update(float(v) for v in scaled[(scaled >= lo) & (scaled <= hi)])
    return sorted(vals, reverse=True)


def auto_params(space: FiniteMetricSpace, E, delta: float) -> DPlumpParams:
    """Largest ``b0`` for which ``E`` passes the constraint and d-plumpness
    stages, with ``m = 0``.

    ``B0`` is the smallest realized distance strictly above ``diam E`` (twice
    the diameter when none exists, 1 for a one-point space), so that the ``E``-side
    center covers ``E`` with a strict inequality.  ``b0`` is searched
    downward over ``[12 B0 delta, B0]``; d-plumpness only changes where
    ``b0 delta**k`` meets a realized distance, so those values, plus the
    endpoints, are the only candidates needed.

    Raises
    ------
    InvalidParams
        ``delta`` outside ``(0, 1/12]`` or ``E`` empty.
    NoFeasibleB0
        No candidate passes; ``constraint`` names the binding condition.
    """
    if not 0 < delta <= 1 / 12:
        raise InvalidParams(f"need 0 < delta <= 1/12 so that 12*B0*delta <= b0 <= B0, got {delta}")
    member = SubsetMask.from_any(E, space.n).member
    if not member.any():
        raise EmptySubset("E must be nonempty")
    diam = space.diam(member)
    above = space.realized_distances[space.realized_distances > diam]
    if above.size:
        B0 = float(above[0])
    else:
        B0 = 2 * diam if diam > 0 else 1.0
    lo, hi = 12 * B0 * delta, B0
    probe = DPlumpParams(delta, 0, lo, B0)
    k_hi = resolution_level(space, probe)
    last = None
    for b0 in _b0_candidates(space, delta, lo, hi, k_hi):
        p = DPlumpParams(delta, 0, b0, B0)
        for side, mask in (("E", member), ("complement", ~member)):
            fail = dplump_failure(space, mask, p)
            if fail is not None:
                last = {"b0": b0, "side": side, "y": fail[0], "k": fail[1]}
                break
        else:
            return p
    raise NoFeasibleB0("d-plumpness fails even at b0 = 12*B0*delta", detail=last)
