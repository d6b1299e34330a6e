"""Tail profiles, the uniform-tail search, and degree statistics."""

import math

import numpy as np
import pytest

from graphonlab.graphon_core import GraphonError
from graphonlab.regularity import (
    clique_plus_isolated,
    cycle_graph,
    default_m_grid,
    er_power_graph,
    graph_degree_stats,
    graph_tail_profile,
    perfect_matching,
    required_m,
    sequence_tail_regularity,
    upper_regularity_statistic,
)
from graphonlab.sampling import SampledGraph


def complete_graph(n):
    edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return SampledGraph(np.arange(1, n + 1), np.array(edges))


def star_graph(leaves):
    edges = [(1, i) for i in range(2, leaves + 2)]
    return SampledGraph(np.arange(1, leaves + 2), np.array(edges))


class TestTailProfile:
    def test_clique_saturates_at_sqrt2(self):
        g = complete_graph(40)
        prof = graph_tail_profile(g, [1.5])
        assert prof.shares[0] == pytest.approx(2.0)

    def test_star_hub_carries_everything(self):
        k = 16
        g = star_graph(k)
        m = 1.0 / math.sqrt(2 * k)
        prof = graph_tail_profile(g, [m])
        # prefix of one vertex (the hub) has degree k = |E|
        assert prof.shares[0] == pytest.approx(1.0)

    def test_matching_prefix_share_vanishes(self):
        for m in (64, 256):
            g = perfect_matching(m)
            prof = graph_tail_profile(g, [1.0])
            assert prof.shares[0] == pytest.approx(math.ceil(math.sqrt(m)) / m)

    def test_share_nondecreasing_reaches_two(self):
        rng = np.random.default_rng(0)
        for seed in range(5):
            g = er_power_graph(200, 0.8, seed=seed)
            ms = np.sort(rng.uniform(0.05, 50.0, size=12))
            prof = graph_tail_profile(g, ms)
            assert np.all(np.diff(prof.shares) >= -1e-12)
            assert prof.shares.max() <= 2.0 + 1e-12
            big = graph_tail_profile(g, [100.0])
            assert big.shares[0] == pytest.approx(2.0)

    def test_isolated_vertices_do_not_change_profile(self):
        g = complete_graph(12)
        padded = SampledGraph(np.arange(1, 30), g.edges)
        ms = [0.3, 1.0, 2.0]
        assert np.allclose(graph_tail_profile(g, ms).shares, graph_tail_profile(padded, ms).shares)

    def test_empty_graph_rejected(self):
        g = SampledGraph(np.array([1]), np.zeros((0, 2), dtype=np.int64))
        with pytest.raises(GraphonError, match="edge"):
            graph_tail_profile(g, [1.0])


class TestSequenceTailRegularity:
    def test_cliques_bounded_m(self):
        graphs = [complete_graph(n) for n in (20, 60, 120)]
        res = sequence_tail_regularity(graphs, eps=0.1)
        assert res.ok
        assert res.m >= math.sqrt(2) * 0.99
        # same grid point regardless of clique size
        solo = sequence_tail_regularity([complete_graph(200)], eps=0.1)
        assert solo.m == res.m

    def test_monotone_in_eps(self):
        graphs = [er_power_graph(300, 0.6, seed=s) for s in range(3)]
        m_loose = sequence_tail_regularity(graphs, eps=1.0).m
        m_tight = sequence_tail_regularity(graphs, eps=0.2).m
        assert m_tight >= m_loose

    def test_er_required_m_grows(self):
        m_small = required_m(er_power_graph(1000, 0.5, seed=1), eps=0.1)
        m_large = required_m(er_power_graph(10_000, 0.5, seed=1), eps=0.1)
        assert m_large >= 1.5 * m_small

    def test_failure_witness(self):
        graphs = [perfect_matching(4000), complete_graph(30)]
        res = sequence_tail_regularity(graphs, eps=0.1, m_grid=default_m_grid(hi=2.0))
        assert not res.ok
        assert res.witness_index == 0
        assert res.witness_profile is not None

    def test_matchings_need_growing_m(self):
        # bounded average degree with growing |E|: required M grows ~ sqrt(m)
        m1 = required_m(perfect_matching(256), eps=0.5)
        m2 = required_m(perfect_matching(1024), eps=0.5)
        assert m2 >= 1.4 * m1

    def test_eps_range_validated(self):
        with pytest.raises(GraphonError):
            sequence_tail_regularity([complete_graph(4)], eps=2.5)


class TestDegreeStats:
    def test_clique_normalized_count(self):
        m = 50
        g = complete_graph(m)
        avg, counts = graph_degree_stats(g, [0.5])
        assert avg == pytest.approx(m - 1)
        assert counts[0] == pytest.approx(m / math.sqrt(m * (m - 1)), abs=1e-12)

    def test_threshold_excludes(self):
        g = star_graph(9)  # hub degree 9, leaves degree 1, |E| = 9
        scale = math.sqrt(18.0)
        _, counts = graph_degree_stats(g, [1.0, 3.0])
        assert counts[0] == pytest.approx(1 / scale)  # only the hub exceeds sqrt(2|E|)
        assert counts[1] == 0.0


class TestUpperRegularityStatistic:
    def test_clique_single_class(self):
        g = complete_graph(25)
        assert upper_regularity_statistic(g, 1, 1.0) == pytest.approx(1.0)
        assert upper_regularity_statistic(g, 1, 1.0 + 1e-9) == 0.0

    def test_er_mass_spreads_thin(self):
        g = er_power_graph(2000, 0.5, seed=3)
        assert upper_regularity_statistic(g, 10, 4.0) == pytest.approx(0.0)

    def test_dense_clique_block_concentrates(self):
        # clique on sqrt-size block: the rescaled kernel piles up mass
        g = clique_plus_isolated(400, 0.5)
        stat = upper_regularity_statistic(g, 20, 4.0)
        assert stat > 0.5

    def test_class_count_validated(self):
        g = complete_graph(5)
        with pytest.raises(GraphonError):
            upper_regularity_statistic(g, 6, 1.0)


class TestGraphFamilies:
    def test_er_edge_count_scale(self):
        n = 2000
        g = er_power_graph(n, 0.5, seed=0)
        expect = 0.5 * n * (n - 1) * n ** (-0.5)
        assert abs(g.num_edges - expect) <= 5 * math.sqrt(expect)

    def test_er_determinism(self):
        a = er_power_graph(500, 0.5, seed=9)
        b = er_power_graph(500, 0.5, seed=9)
        assert np.array_equal(a.edges, b.edges)

    def test_er_decode_valid_pairs(self):
        g = er_power_graph(300, 0.7, seed=2)
        assert g.edges[:, 0].min() >= 1
        assert g.edges[:, 1].max() <= 300
        assert np.all(g.edges[:, 0] < g.edges[:, 1])

    def test_clique_family_shape(self):
        g = clique_plus_isolated(1000, 0.5)
        m = int(1000 ** 0.75)
        assert g.num_vertices == 1000
        assert g.num_edges == m * (m - 1) // 2

    def test_cycle(self):
        g = cycle_graph(5)
        assert g.num_edges == 5
        assert set(g.degree_sequence().tolist()) == {2}
