import json

import numpy as np
import pytest

from cliquedecomp import (
    DimacsParseError,
    generate_bernoulli_symmetric,
    generate_planted,
    graph_from_json,
    graph_to_json,
    parse_dimacs,
)


def check_basic_invariants(adj):
    assert np.array_equal(adj, adj.T)
    assert np.isin(adj, (0.0, 1.0)).all()
    assert np.all(np.diag(adj) == 1.0)


class TestGeneratePlanted:
    def test_whole_graph_clique_is_complete(self):
        inst = generate_planted(5, 5, 0.5, seed=1)
        assert inst.graph.adjacency.sum() == 25

    def test_clique_block_all_ones(self):
        inst = generate_planted(200, 50, 0.5, seed=7)
        adj = inst.graph.adjacency
        check_basic_invariants(adj)
        assert np.all(adj[:50, :50] == 1.0)
        assert inst.clique_vertices == frozenset(range(50))

    def test_off_clique_edge_count_within_4_sigma(self):
        # off-clique unordered pairs at N=200, n=50: C(200,2) - C(50,2)
        N, n, p = 200, 50, 0.5
        inst = generate_planted(N, n, p, seed=7)
        adj = inst.graph.adjacency
        pairs = N * (N - 1) // 2 - n * (n - 1) // 2
        edges = (np.triu(adj, 1).sum()) - n * (n - 1) // 2
        mean = p * pairs
        sd = np.sqrt(pairs * p * (1 - p))
        assert abs(edges - mean) <= 4 * sd

    def test_deterministic_under_seed(self):
        a = generate_planted(200, 50, 0.5, seed=7).graph.adjacency
        b = generate_planted(200, 50, 0.5, seed=7).graph.adjacency
        assert np.array_equal(a, b)

    def test_shuffle_relabels_but_preserves_structure(self):
        inst = generate_planted(40, 10, 0.5, seed=3, shuffle=True)
        adj = inst.graph.adjacency
        check_basic_invariants(adj)
        idx = sorted(inst.clique_vertices)
        assert len(idx) == 10
        assert np.all(adj[np.ix_(idx, idx)] == 1.0)
        # same seed, same labels
        again = generate_planted(40, 10, 0.5, seed=3, shuffle=True)
        assert again.clique_vertices == inst.clique_vertices

    @pytest.mark.parametrize("n,p", [(0, 0.5), (11, 0.5), (5, 0.0), (5, 1.0)])
    def test_invalid_arguments(self, n, p):
        with pytest.raises(ValueError):
            generate_planted(10, n, p, seed=0)

    def test_ground_truth_decomposition(self):
        inst = generate_planted(30, 8, 0.4, seed=2)
        t = inst.ground_truth()
        assert np.array_equal(t.l_star + t.s_star, inst.graph.adjacency)
        assert np.all(t.s_star[:8, :8] == 0.0)
        assert t.clique_size == 8
        sigma = np.linalg.svd(t.l_star, compute_uv=False)
        assert sigma[0] == pytest.approx(8.0)
        assert sigma[1] == pytest.approx(0.0, abs=1e-12)


class TestGenerateBernoulli:
    def test_symmetric_unit_diagonal(self):
        g = generate_bernoulli_symmetric(200, 0.8, seed=3)
        check_basic_invariants(g.adjacency)

    def test_density_within_4_sigma(self):
        N, p = 500, 0.87
        g = generate_bernoulli_symmetric(N, p, seed=11)
        pairs = N * (N - 1) // 2
        edges = np.triu(g.adjacency, 1).sum()
        sd = np.sqrt(pairs * p * (1 - p))
        assert abs(edges - p * pairs) <= 4 * sd

    def test_determinism(self):
        a = generate_bernoulli_symmetric(100, 0.3, seed=5).adjacency
        b = generate_bernoulli_symmetric(100, 0.3, seed=5).adjacency
        assert np.array_equal(a, b)

    def test_probability_near_one_forces_complete_graph(self):
        g = generate_bernoulli_symmetric(3, 1.0 - 1e-12, seed=0)
        assert np.array_equal(g.adjacency, np.ones((3, 3)))

    def test_invalid_probability(self):
        with pytest.raises(ValueError):
            generate_bernoulli_symmetric(10, 1.0, seed=0)


class TestParseDimacs:
    def test_path_graph(self):
        g = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3")
        expected = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]], dtype=float)
        assert np.array_equal(g.adjacency, expected)
        assert g.n_edges == 2

    def test_index_out_of_range_names_line(self):
        with pytest.raises(DimacsParseError, match="line 2"):
            parse_dimacs("p edge 2 1\ne 1 3")

    def test_missing_problem_line(self):
        with pytest.raises(DimacsParseError, match="problem line"):
            parse_dimacs("c just a comment\n")

    def test_edge_before_problem_line(self):
        with pytest.raises(DimacsParseError, match="line 1"):
            parse_dimacs("e 1 2\np edge 3 2")

    def test_malformed_line(self):
        with pytest.raises(DimacsParseError, match="line 2"):
            parse_dimacs("p edge 3 2\ne one two")

    def test_duplicate_edges_idempotent(self):
        g = parse_dimacs("p edge 3 3\ne 1 2\ne 2 1\ne 1 2")
        assert g.n_edges == 1

    def test_comments_and_bytes_input(self):
        g = parse_dimacs(b"c header\np edge 2 1\ne 1 2\n")
        assert g.n_vertices == 2
        assert g.adjacency[0, 1] == 1.0

    def test_node_lines_ignored_with_warning(self):
        with pytest.warns(UserWarning, match="node lines"):
            g = parse_dimacs("p edge 2 1\nn 1 5\ne 1 2")
        assert g.n_edges == 1

    def test_edge_weights_ignored_with_warning(self):
        with pytest.warns(UserWarning, match="weights"):
            g = parse_dimacs("p edge 2 1\ne 1 2 7")
        assert g.adjacency[0, 1] == 1.0


class TestJsonInterface:
    def test_round_trip(self):
        inst = generate_planted(25, 6, 0.5, seed=9)
        doc = graph_to_json(inst.graph)
        back = graph_from_json(json.loads(json.dumps(doc)))
        assert np.array_equal(back.adjacency, inst.graph.adjacency)

    def test_edges_are_zero_based_upper(self):
        g = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3")
        doc = graph_to_json(g)
        assert doc == {"n": 3, "edges": [[0, 1], [1, 2]]}

    def test_bad_documents(self):
        with pytest.raises(ValueError):
            graph_from_json({"edges": []})
        with pytest.raises(ValueError):
            graph_from_json({"n": 2, "edges": [[0, 5]]})
