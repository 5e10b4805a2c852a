import numpy as np
import pytest

from coopaug import (AGENT_TYPES, Agent, CmagConfig, CooperativeGroup,
                     GateChoice, MismatchedGrids, PointCloud, RigidTransform,
                     RngStream, TABLE_DISTRIBUTIONS, cfc_l1, cmag,
                     comprehensive_from_tables, early_fuse, fuse_grids,
                     occupancy, total_loss, validate_group)

EXTENT = (-20.0, 20.0, -20.0, 20.0)


def agent(aid, x=0.0, n_points=50, is_ego=False, seed=0):
    rng = np.random.default_rng(seed)
    xyz = rng.uniform(-15, 15, (n_points, 3))
    return Agent(id=aid, pose=RigidTransform.from_ypr(0.0, translation=(x, 0.0, 1.5)),
                 cloud=PointCloud.from_arrays(xyz, rng.uniform(0, 1, n_points)),
                 agent_type=AGENT_TYPES["A"], is_ego=is_ego)


def group(n=3):
    return CooperativeGroup(tuple(
        agent(f"a{i}", x=4.0 * i, is_ego=(i == 0), seed=i) for i in range(n)))


class TestEarlyFuse:
    def test_concatenation_order(self):
        g = CooperativeGroup((agent("e", n_points=100, is_ego=True),
                              agent("a", n_points=50, seed=1)))
        fused = early_fuse(g)
        assert len(fused) == 150
        assert np.array_equal(fused.xyz[:100], g.agents[0].cloud.xyz)

    def test_single_agent(self):
        g = CooperativeGroup((agent("e", is_ego=True),))
        assert np.array_equal(early_fuse(g).xyz, g.agents[0].cloud.xyz)

    def test_empty_cloud_member(self):
        empty = Agent("x", RigidTransform.identity(), PointCloud.empty("ego"),
                      AGENT_TYPES["A"], False)
        g = CooperativeGroup((agent("e", n_points=10, is_ego=True), empty))
        assert len(early_fuse(g)) == 10


class TestOccupancy:
    def test_empty_cloud(self):
        grid = occupancy(PointCloud.empty("ego"), EXTENT, 0.5)
        assert grid.cells.sum() == 0

    def test_single_center_point(self):
        grid = occupancy(PointCloud.from_arrays([[0.1, 0.1, 5.0]]), EXTENT, 0.5)
        assert grid.cells.sum() == 1

    def test_idempotent_per_cell(self):
        one = occupancy(PointCloud.from_arrays([[0.1, 0.1, 0.0]]), EXTENT, 0.5)
        two = occupancy(PointCloud.from_arrays([[0.1, 0.1, 0.0], [0.2, 0.2, 9.0]]),
                        EXTENT, 0.5)
        assert np.array_equal(one.cells, two.cells)

    def test_outside_extent_ignored(self):
        grid = occupancy(PointCloud.from_arrays([[500.0, 0.0, 0.0]]), EXTENT, 0.5)
        assert grid.cells.sum() == 0

    def test_half_open_cells(self):
        grid = occupancy(PointCloud.from_arrays([[0.0, 0.0, 0.0]]), (0.0, 1.0, 0.0, 1.0), 0.5)
        assert grid.cells[0, 0] == 1 and grid.cells.sum() == 1


class TestFuseGrids:
    def test_zero_is_identity(self):
        g = occupancy(PointCloud.from_arrays([[1.0, 1.0, 0.0]]), EXTENT, 0.5)
        z = occupancy(PointCloud.empty("ego"), EXTENT, 0.5)
        assert np.array_equal(fuse_grids([g, z]).cells, g.cells)

    def test_idempotence(self):
        g = occupancy(PointCloud.from_arrays([[1.0, 1.0, 0.0]]), EXTENT, 0.5)
        assert np.array_equal(fuse_grids([g, g]).cells, g.cells)

    def test_disjoint_union(self):
        a = occupancy(PointCloud.from_arrays([[1.0, 1.0, 0.0]]), EXTENT, 0.5)
        b = occupancy(PointCloud.from_arrays([[-3.0, 2.0, 0.0]]), EXTENT, 0.5)
        assert fuse_grids([a, b]).cells.sum() == 2

    def test_mismatch(self):
        a = occupancy(PointCloud.empty("ego"), EXTENT, 0.5)
        b = occupancy(PointCloud.empty("ego"), EXTENT, 0.25)
        with pytest.raises(MismatchedGrids):
            fuse_grids([a, b])


class TestCfcL1:
    def test_identical_grids(self):
        g = occupancy(PointCloud.from_arrays([[1.0, 1.0, 0.0]]), EXTENT, 0.5)
        assert cfc_l1(g, g) == 0.0

    def test_counting(self):
        a = occupancy(PointCloud.from_arrays([[1.0, 1.0, 0], [2.0, 2.0, 0], [3.0, 3.0, 0]]),
                      EXTENT, 0.5)
        b = occupancy(PointCloud.empty("ego"), EXTENT, 0.5)
        assert cfc_l1(a, b) == 3.0

    def test_union_max_equivalence(self):
        g = group(3)
        per_agent = fuse_grids([occupancy(a.cloud, EXTENT, 0.5) for a in g.agents])
        early = occupancy(early_fuse(g), EXTENT, 0.5)
        assert cfc_l1(per_agent, early) == 0.0


class TestTotalLoss:
    def test_arithmetic(self):
        assert total_loss(2.0, 0.5, 1.0, 1.0) == 2.5

    def test_zero_weight(self):
        assert total_loss(3.0, 100.0, 2.0, 0.0) == 6.0

    def test_zero_losses(self):
        assert total_loss(0.0, 0.0, 1.0, 1.0) == 0.0


class TestCmag:
    PHI_S = TABLE_DISTRIBUTIONS["opv2v"]

    def run(self, g, seed=0, **cfg_kwargs):
        cfg = CmagConfig(seed=seed, **cfg_kwargs)
        return cmag(g, self.PHI_S, comprehensive_from_tables(), cfg,
                    RngStream(seed, "aug"))

    def test_single_agent_passthrough(self):
        g = CooperativeGroup((agent("e", is_ego=True),))
        assert self.run(g) is g

    def test_forced_keep_preserves_count(self):
        g = group(3)
        out = cmag(g, self.PHI_S, comprehensive_from_tables(), CmagConfig(seed=1),
                   RngStream(1, "aug"), decision=GateChoice.KEEP)
        assert out.n == 3

    def test_determinism_bitwise(self):
        g = group(3)
        a = self.run(g, seed=5)
        b = self.run(g, seed=5)
        assert a.n == b.n
        for x, y in zip(a.agents, b.agents):
            assert x.id == y.id and x.is_ego == y.is_ego
            assert np.array_equal(x.cloud.xyz, y.cloud.xyz)
            assert np.array_equal(x.cloud.intensity, y.cloud.intensity)

    def test_count_contract_and_single_ego(self):
        for seed in range(30):
            g = group(3)
            out = self.run(g, seed=seed)
            assert out.n in (2, 3, 4)
            assert validate_group(out) is None

    def test_minus_at_two_keeps_one_ego(self):
        g = group(2)
        out = cmag(g, self.PHI_S, comprehensive_from_tables(), CmagConfig(seed=3),
                   RngStream(3, "aug"), decision=GateChoice.MINUS)
        assert out.n == 1
        assert out.agents[0].is_ego
