"""Acceptance suite: one PASS/FAIL line per criterion, echoed in the
terminal summary."""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from dyadic_cubes import (
    DPlumpParams,
    NetParams,
    PlumpParams,
    build_cube_system,
    build_order,
    build_plain_points,
    certify_cube_candidate,
    check_dplump,
    check_plump,
    dplump_to_plump,
    from_points,
    plump_to_dplump,
    verify_all_cubes_plump,
    verify_cube_system,
    verify_order,
    verify_point_system,
)
from dyadic_cubes.cli import main
from dyadic_cubes.nets import default_levels

from conftest import ACCEPTANCE_LINES, line_metric, random_cloud
from oracles import corkscrew_ok, dplump_direct, plump_dense

GOLDEN = Path(__file__).parent / "golden" / "grid16_left_certificate.json"
GRID_PARAMS = DPlumpParams(1 / 16, 0, 6, 8)
DPLUMP_ARGS = ["--delta", "1/16", "--m", "0", "--b0", "6", "--B0", "8"]


def report(tag, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{tag}] {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def cloud_systems():
    rng = np.random.default_rng(20240601)
    out = []
    t0 = time.perf_counter()
    for _ in range(100):
        space = random_cloud(rng, 16, 200)
        lo, hi = default_levels(space, 1 / 16, 1.0, 1.0)
        sys = build_plain_points(space, NetParams(1 / 16, 1.0, 1.0, lo, hi))
        order = build_order(space, sys)
        cubes = build_cube_system(space, sys, order)
        reports = [verify_point_system(space, sys), verify_order(space, sys, order),
                   verify_cube_system(space, cubes, exhaustive=True)]
        out.append((space, cubes, reports))
    return out, time.perf_counter() - t0


def test_1_cube_axioms(cloud_systems):
    systems, elapsed = cloud_systems
    violations = sum(len(r["violations"]) for _, _, reps in systems for r in reps)
    sizes = [s.n for s, _, _ in systems]
    report("1", violations == 0 and elapsed < 60,
           f"{len(systems)} clouds (n {min(sizes)}-{max(sizes)}), {violations} violations, "
           f"{elapsed:.1f}s build+verify (budget 60s)")


def test_2_forward_plumpness(cloud_systems):
    systems, _ = cloud_systems
    checked = failed = 0
    for space, cubes, _ in systems:
        rep = verify_all_cubes_plump(space, cubes)
        checked += rep["checked"]
        failed += len(rep["failures"])
    report("2", failed == 0 and checked > 0,
           f"{checked} cube/complement d-plump checks with b0=c1, B0=c1+C1, {failed} failures")


def test_3_converse_fixture(grid16, E_left, tmp_path, capsys):
    cert = certify_cube_candidate(grid16, E_left, GRID_PARAMS)
    k, a = cert.cube
    ok = (cert.accepted and (k, a) == (0, cert.system.alpha0)
          and (cert.cubes.params.c1, cert.cubes.params.C1) == (2, 16)
          and cert.cubes.members[0][a].tolist() == E_left)
    grid = tmp_path / "grid16.json"
    grid.write_text(json.dumps({"n": 16, "dist": line_metric(16).tolist()}))
    subset = tmp_path / "left.json"
    subset.write_text(json.dumps(E_left))
    code = main(["certify-cube", str(grid), "--subset", str(subset), *DPLUMP_ARGS])
    out = capsys.readouterr().out
    same = out.encode() == GOLDEN.read_bytes()
    report("3", ok and code == 0 and same,
           f"grid16 E={{0..7}} accepted={cert.accepted}, c1={cert.cubes.params.c1:g}, "
           f"C1={cert.cubes.params.C1:g}, Q=E: {ok}, golden byte-identical: {same}")


def test_4_rejection_soundness(grid16, E_even):
    cert = certify_cube_candidate(grid16, E_even, GRID_PARAMS)
    w = cert.witness or {}
    member = np.isin(np.arange(16), E_even)
    recheck = not corkscrew_ok(grid16.dist, member, w.get("y", -1),
                               GRID_PARAMS.outer(w.get("k", 0)), GRID_PARAMS.inner(w.get("k", 0)))
    first = (w.get("y"), w.get("k")) == (0, 0)
    v = check_plump(grid16, [0, 15], PlumpParams(8, 1 / 2))
    cex = v.counterexample or {}
    r = cex.get("r")
    ends = np.isin(np.arange(16), [0, 15])
    plump_recheck = r is not None and not corkscrew_ok(grid16.dist, ends, cex["y"], r, r / 2)
    report("4", (not cert.accepted) and first and recheck and (not v.certified) and plump_recheck,
           f"evens rejected at {cert.failed_stage} (y={w.get('y')}, k={w.get('k')}), "
           f"independent recheck fails: {recheck}; {{0,15}} fails at y={cex.get('y')}, r={r}, "
           f"recheck fails: {plump_recheck}")


def lattice_instance(rng, n_hi=64):
    side = 9
    n = int(rng.integers(4, n_hi + 1))
    cells = rng.choice(side * side, size=n, replace=False)
    pts = np.column_stack([cells // side, cells % side]).astype(float)
    space = from_points(pts, metric=str(rng.choice(["cityblock", "chebyshev"])))
    if rng.random() < 0.5:
        # half-planes and quadrants give plump sets often enough
        member = pts[:, 0] + rng.integers(0, 2) * pts[:, 1] <= rng.integers(2, 10)
    else:
        member = rng.random(n) < rng.uniform(0.3, 0.95)
    return space, member


def test_5_oracle_equivalence():
    rng = np.random.default_rng(5)
    agree = certified = 0
    for _ in range(50):
        space, member = lattice_instance(rng)
        # integer metrics; 1000 / R integral puts every d and d / b on the grid
        R = float(rng.choice([4, 5, 8, 10]))
        b = float(rng.choice([1 / 2, 1 / 4, 1 / 8]))
        fast = check_plump(space, member, PlumpParams(R, b)).certified
        slow = plump_dense(space.dist, member, R, b, grid=1000)
        agree += fast == slow
        certified += fast
    report("5", agree == 50,
           f"critical radii vs 1000-radius oracle: {agree}/50 agree "
           f"({certified} certified, {50 - certified} not)")


def test_6_transport():
    rng = np.random.default_rng(6)
    deltas = [1 / 2, 1 / 4, 1 / 16]
    forward = backward = tried = 0
    ok_f = ok_b = 0
    while (forward < 50 or backward < 50) and tried < 5000:
        tried += 1
        space, member = lattice_instance(rng, n_hi=40)
        if forward < 50:
            p = PlumpParams(float(rng.choice([2, 4, 8])), float(rng.choice([1 / 2, 1 / 4, 1 / 8])))
            if check_plump(space, member, p).certified:
                delta = deltas[forward % 3]
                ok_f += check_dplump(space, member, plump_to_dplump(p, delta)).certified
                forward += 1
        if backward < 50:
            q = DPlumpParams(deltas[backward % 3], int(rng.integers(-2, 1)),
                             float(rng.choice([1 / 2, 1])), float(rng.choice([1, 2])))
            if dplump_direct(space.dist, member, q.delta, q.m, q.b0, q.B0) is None:
                ok_b += check_plump(space, member, dplump_to_plump(q)).certified
                backward += 1
    report("6", ok_f == forward == 50 and ok_b == backward == 50,
           f"plump->d-plump {ok_f}/{forward}, d-plump->plump {ok_b}/{backward} "
           f"(delta in 1/2, 1/4, 1/16)")


def test_7_cli_determinism(tmp_path, capsys):
    grid = tmp_path / "grid16.json"
    grid.write_text(json.dumps({"n": 16, "dist": line_metric(16).tolist()}))
    left = tmp_path / "left.json"
    left.write_text(json.dumps(list(range(8))))
    even = tmp_path / "even.json"
    even.write_text(json.dumps(list(range(0, 16, 2))))
    main(["build-system", str(grid), "--out", str(tmp_path / "sys.json")])
    commands = [
        ["validate", grid],
        ["doubling", grid],
        ["plump-check", grid, "--subset", left, *DPLUMP_ARGS],
        ["plump-check", grid, "--subset", even, "--R", "8", "--b", "1/2"],
        ["build-system", grid],
        ["certify-cube", grid, "--subset", left, *DPLUMP_ARGS],
        ["certify-cube", grid, "--subset", even, "--auto"],
        ["verify-system", grid, "--system", tmp_path / "sys.json"],
    ]
    identical = 0
    for argv in commands:
        runs = []
        for _ in range(2):
            code = main([str(a) for a in argv])
            cap = capsys.readouterr()
            runs.append((code, cap.out, cap.err))
        identical += runs[0] == runs[1]
    report("7a", identical == len(commands),
           f"{identical}/{len(commands)} CLI invocations byte-identical across two runs")
