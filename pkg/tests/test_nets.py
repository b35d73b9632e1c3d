import numpy as np
import pytest

from dyadic_cubes import (
    DPlumpParams,
    NetParams,
    build_adapted_points,
    build_plain_points,
    from_points,
    validate_metric,
    verify_point_system,
)
from dyadic_cubes.exceptions import (
    EmptyEligibleSet,
    EmptySubset,
    HypothesisViolated,
    InvalidParams,
    SideCoveringFailure,
)
from dyadic_cubes.nets import COMPLEMENT_SIDE, E_SIDE, UNCONSTRAINED, DyadicPointSystem, default_levels

from conftest import random_cloud

GRID_PARAMS = DPlumpParams(1 / 16, 0, 6, 8)


def plain(space, delta=1 / 16, c0=1.0, C0=1.0):
    lo, hi = default_levels(space, delta, c0, C0)
    return build_plain_points(space, NetParams(delta, c0, C0, lo, hi))


class TestParams:
    def test_hypothesis(self):
        NetParams(1 / 16, 1, 1, 0, 1).validate(cube_hypothesis=True)
        with pytest.raises(HypothesisViolated):
            NetParams(1 / 2, 1, 1, 0, 1).validate(cube_hypothesis=True)

    @pytest.mark.parametrize("bad", [(0, 1, 1, 0, 1), (0.5, 2, 1, 0, 1), (0.5, 1, 1, 2, 1)])
    def test_invalid(self, bad):
        with pytest.raises(InvalidParams):
            NetParams(*bad).validate()


class TestPlain:
    def test_grid(self, grid16):
        sys = build_plain_points(grid16, NetParams(1 / 16, 1, 1, -1, 1))
        assert sys.centers[-1].tolist() == [0]
        assert sys.centers[0].tolist() == list(range(16))
        assert sys.centers[1].tolist() == list(range(16))
        assert verify_point_system(grid16, sys)["ok"]

    def test_default_levels(self, grid16):
        # 16 > 15 = diam at k = -1; 1 * (1/16)^0 = 1 is not below minpos, k = 1 is
        assert default_levels(grid16, 1 / 16, 1, 1) == (-1, 1)

    def test_single_point(self):
        space = validate_metric([[0]])
        sys = plain(space)
        assert list(sys.levels) == [0]
        assert sys.centers[0].tolist() == [0]

    def test_two_points(self):
        sys = plain(validate_metric([[0, 1], [1, 0]]))
        assert sys.centers[sys.params.k_min].tolist() == [0]
        assert sys.centers[sys.params.k_max].tolist() == [0, 1]

    def test_clouds(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            space = random_cloud(rng)
            sys = plain(space)
            assert verify_point_system(space, sys)["ok"]
            lv = list(sys.levels)
            # maximality: every point is within the separation radius of a center
            for k in lv:
                cs = sys.centers[k]
                assert (space.dist[cs].min(axis=0) < sys.params.separation(k)).all()
            # persistence and finest-level totality
            for k in lv[:-1]:
                assert set(sys.centers[k]) <= set(sys.centers[k + 1])
            assert sys.centers[lv[-1]].size == space.n
            assert sys.centers[lv[0]].size == 1

    def test_deterministic(self):
        pts = np.random.default_rng(5).uniform(size=(80, 2))
        a, b = plain(from_points(pts)), plain(from_points(pts))
        assert a.to_dict() == b.to_dict()

    def test_planted_faults(self, grid16):
        sys = build_plain_points(grid16, NetParams(1 / 16, 1, 1, -1, 1))
        bad = DyadicPointSystem(sys.params, {**sys.centers, -1: np.array([0, 3])},
                                {**sys.sides, -1: (UNCONSTRAINED,) * 2})
        checks = {v["check"] for v in verify_point_system(grid16, bad)["violations"]}
        assert "separation" in checks
        bad = DyadicPointSystem(sys.params, {**sys.centers, 1: np.arange(15)}, sys.sides)
        checks = {v["check"] for v in verify_point_system(grid16, bad)["violations"]}
        assert checks == {"covering", "nesting"}

    def test_round_trip(self, grid16):
        sys = build_plain_points(grid16, NetParams(1 / 16, 1, 1, -1, 1))
        again = DyadicPointSystem.from_dict(sys.to_dict(), 16)
        assert again.to_dict() == sys.to_dict()


class TestAdapted:
    def test_grid(self, grid16, E_left):
        sys = build_adapted_points(grid16, E_left, GRID_PARAMS, k_max=1)
        assert sys.m == 0
        assert sys.centers[0].tolist() == [0, 13]
        assert sys.sides[0] == (E_SIDE, COMPLEMENT_SIDE)
        assert sys.alpha0 == 0
        assert sys.centers[1].tolist() == list(range(16))
        assert sys.sides[1] == (E_SIDE,) * 8 + (COMPLEMENT_SIDE,) * 8
        assert verify_point_system(grid16, sys)["ok"]

    def test_full_space(self, grid16):
        sys = build_adapted_points(grid16, range(16), DPlumpParams(1 / 16, 0, 12, 16))
        assert set(sys.sides[0]) == {E_SIDE}
        assert sys.centers[0].size == 1
        assert verify_point_system(grid16, sys)["ok"]

    def test_side_covering_failure(self, grid16, E_even):
        with pytest.raises(SideCoveringFailure) as exc:
            build_adapted_points(grid16, E_even, DPlumpParams(1 / 16, 0, 0.5, 1))
        assert exc.value.side in (E_SIDE, COMPLEMENT_SIDE)

    def test_empty_eligible(self, grid16, E_even):
        # no even point is 6 away from the odd points
        with pytest.raises(EmptyEligibleSet):
            build_adapted_points(grid16, E_even, GRID_PARAMS)

    def test_empty_subset(self, grid16):
        with pytest.raises(EmptySubset):
            build_adapted_points(grid16, [], GRID_PARAMS)

    def test_planted_side_fault(self, grid16, E_left):
        sys = build_adapted_points(grid16, E_left, GRID_PARAMS, k_max=1)
        bad = DyadicPointSystem(sys.params, sys.centers,
                                {**sys.sides, 0: (COMPLEMENT_SIDE, COMPLEMENT_SIDE)},
                                subset=sys.subset, m=sys.m, alpha0=sys.alpha0)
        checks = {v["check"] for v in verify_point_system(grid16, bad)["violations"]}
        assert "side_tag" in checks
        bad = DyadicPointSystem(sys.params, {**sys.centers, 0: np.array([0, 7, 13])},
                                {**sys.sides, 0: (E_SIDE, E_SIDE, COMPLEMENT_SIDE)},
                                subset=sys.subset, m=sys.m, alpha0=0)
        checks = {v["check"] for v in verify_point_system(grid16, bad)["violations"]}
        assert {"side_margin", "unique_e_center"} <= checks
