import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyadic_cubes import (
    DPlumpParams,
    PlumpParams,
    check_dplump,
    check_plump,
    dplump_to_plump,
    plump_to_dplump,
    validate_metric,
    weaken_plump_params,
)
from dyadic_cubes.exceptions import InvalidParams
from dyadic_cubes.plumpness import critical_scales, resolution_level

from conftest import lattice_space
from oracles import corkscrew_ok, dplump_direct, plump_dense

GRID_PARAMS = DPlumpParams(1 / 16, 0, 6, 8)


def random_instance(rng, n_hi=24):
    space = lattice_space(rng, n_hi=n_hi, side=9)
    member = rng.random(space.n) < rng.uniform(0.3, 0.9)
    return space, member


class TestDPlump:
    def test_grid_left_half(self, grid16, E_left):
        v = check_dplump(grid16, E_left, GRID_PARAMS)
        assert v.certified and v.counterexample is None
        w = next(w for w in v.witnesses if w["y"] == 0 and w["k"] == 0)
        # any valid witness; the ascending scan happens to find z=0
        assert corkscrew_ok(grid16.dist, np.isin(np.arange(16), E_left), 0, 8, 6)
        assert w["z"] in (0, 1)

    def test_grid_evens(self, grid16, E_even):
        v = check_dplump(grid16, E_even, GRID_PARAMS)
        assert not v.certified and not v.witnesses
        assert (v.counterexample["y"], v.counterexample["k"]) == (0, 0)
        assert len(v.counterexample["rejected"]) == 16
        for rec in v.counterexample["rejected"]:
            # blocking point lies in B(z, 6) but outside B(0, 8) ∩ E
            b = rec["blocking"]
            assert grid16.dist[rec["z"], b] < 6
            assert not (grid16.dist[0, b] < 8 and b % 2 == 0)

    def test_empty_and_full(self, grid16):
        assert check_dplump(grid16, [], GRID_PARAMS).certified
        assert check_dplump(grid16, range(16), DPlumpParams(1 / 16, 0, 12, 16)).certified

    @pytest.mark.parametrize("bad", [(0, 0, 1, 1), (1, 0, 1, 1), (0.5, 0, 2, 1), (0.5, 0, 0, 1)])
    def test_invalid(self, grid16, bad):
        with pytest.raises(InvalidParams):
            check_dplump(grid16, [0], DPlumpParams(*bad))

    def test_resolution_level(self, grid16):
        # 6 / 16 < 1 is the first inner radius below the minimum distance
        assert resolution_level(grid16, GRID_PARAMS) == 1

    def test_singleton_vacuity(self):
        space = validate_metric([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
        # inner radius 1/2 < 1 at every scale: z = y works
        assert check_dplump(space, [1], DPlumpParams(0.5, 0, 0.5, 1)).certified
        # inner radius 1 at k = 0 needs B(z,1) ⊆ {1}, fine; radius 2 would not be
        assert check_dplump(space, [1], DPlumpParams(0.5, 0, 1, 1)).certified
        assert not check_dplump(space, [1], DPlumpParams(0.5, 0, 2, 2)).certified

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_direct_oracle(self, seed):
        rng = np.random.default_rng(seed)
        space, member = random_instance(rng)
        delta = float(rng.choice([1 / 2, 1 / 4]))
        B0 = float(rng.choice([1, 2, 4, 8]))
        b0 = B0 * float(rng.choice([1, 1 / 2, 1 / 4, 1 / 8]))
        m = int(rng.integers(-2, 2))
        v = check_dplump(space, member, DPlumpParams(delta, m, b0, B0))
        ref = dplump_direct(space.dist, member, delta, m, b0, B0)
        assert v.certified == (ref is None)
        if ref is not None:
            assert (v.counterexample["y"], v.counterexample["k"]) == ref

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_monotone_in_b0(self, seed):
        rng = np.random.default_rng(seed)
        space, member = random_instance(rng)
        p = DPlumpParams(0.5, int(rng.integers(-1, 2)), 4.0, 4.0)
        for b0 in (4.0, 2.0, 1.0, 0.5):
            if check_dplump(space, member, DPlumpParams(p.delta, p.m, b0, p.B0)).certified:
                for smaller in (b0 / 2, b0 / 4):
                    assert check_dplump(space, member,
                                        DPlumpParams(p.delta, p.m, smaller, p.B0)).certified
                break

    def test_witnesses_are_valid(self, grid16, E_left):
        member = np.isin(np.arange(16), E_left)
        for w in check_dplump(grid16, E_left, GRID_PARAMS).witnesses:
            z, y, k = w["z"], w["y"], w["k"]
            ball = grid16.dist[z] < GRID_PARAMS.inner(k)
            assert member[ball].all() and (grid16.dist[y][ball] < GRID_PARAMS.outer(k)).all()


class TestPlump:
    def test_grid_left_half(self, grid16, E_left):
        assert check_plump(grid16, E_left, PlumpParams(8, 1 / 16)).certified
        assert plump_dense(grid16.dist, np.arange(16) < 8, 8, 1 / 16)

    def test_grid_endpoints(self, grid16):
        v = check_plump(grid16, [0, 15], PlumpParams(8, 1 / 2))
        assert not v.certified
        cex = v.counterexample
        assert cex["y"] == 0 and 0 < cex["r"] <= 8
        member = np.isin(np.arange(16), [0, 15])
        assert not corkscrew_ok(grid16.dist, member, 0, cex["r"], cex["r"] / 2)

    def test_full_space_small_b(self, grid16):
        # b R < 1: the inner ball is {y}
        assert check_plump(grid16, range(16), PlumpParams(15, 1 / 16)).certified

    def test_empty(self, grid16):
        assert check_plump(grid16, [], PlumpParams(8, 1 / 2)).certified

    @pytest.mark.parametrize("bad", [(0, 0.5), (1, 0), (1, 1), (-1, 0.5)])
    def test_invalid(self, grid16, bad):
        with pytest.raises(InvalidParams):
            check_plump(grid16, [0], PlumpParams(*bad))

    def test_critical_scales_include_R(self, grid16):
        pairs = critical_scales(grid16, PlumpParams(8, 1 / 4))
        assert (8, 2.0) in pairs
        assert all(0 < r <= 8 for r, _ in pairs)
        assert (4.0, 1.0) in pairs  # r = d / b with d = 1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_dense_oracle(self, seed):
        rng = np.random.default_rng(seed)
        space, member = random_instance(rng)
        R = float(rng.choice([4, 5, 8, 10]))
        b = float(rng.choice([1 / 2, 1 / 4, 1 / 8]))
        assert check_plump(space, member, PlumpParams(R, b)).certified == \
            plump_dense(space.dist, member, R, b)


class TestTransport:
    @pytest.mark.parametrize("p, q, expected", [
        ((8, 1 / 4), (4, 1 / 4), True),
        ((8, 1 / 4), (16, 1 / 8), True),
        ((8, 1 / 4), (16, 1 / 4), False),
    ])
    def test_weaken(self, p, q, expected):
        assert weaken_plump_params(PlumpParams(*p), PlumpParams(*q)) is expected

    def test_plump_to_dplump(self):
        assert plump_to_dplump(PlumpParams(8, 1 / 4), 0.5) == DPlumpParams(0.5, -3, 0.25, 1.0)
        assert plump_to_dplump(PlumpParams(1, 1 / 2), 0.5) == DPlumpParams(0.5, 0, 0.5, 1.0)

    def test_dplump_to_plump(self):
        assert dplump_to_plump(GRID_PARAMS) == PlumpParams(128, 3 / 64)
        assert dplump_to_plump(DPlumpParams(0.5, 1, 1, 1)) == PlumpParams(1, 0.5)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([1 / 2, 1 / 4, 1 / 16]))
    def test_plump_implies_dplump(self, seed, delta):
        rng = np.random.default_rng(seed)
        space, member = random_instance(rng)
        p = PlumpParams(float(rng.choice([2, 4, 8])), float(rng.choice([1 / 2, 1 / 4, 1 / 8])))
        if check_plump(space, member, p).certified:
            assert check_dplump(space, member, plump_to_dplump(p, delta)).certified

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_dplump_implies_plump(self, seed):
        rng = np.random.default_rng(seed)
        space, member = random_instance(rng)
        p = DPlumpParams(float(rng.choice([1 / 2, 1 / 4])), int(rng.integers(-2, 1)),
                         float(rng.choice([1 / 2, 1])), 2.0)
        if check_dplump(space, member, p).certified:
            assert check_plump(space, member, dplump_to_plump(p)).certified
