"""Graph containers, seeded random instance generators, and DIMACS / JSON ingestion.

All generators use numpy's PCG64 generator (``np.random.default_rng``), which is
a fixed, platform-independent algorithm: a given seed produces bit-identical
graphs on every machine and under any thread count.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np


class DimacsParseError(ValueError):
    """Raised on malformed DIMACS input; message names the offending line."""


def _validate_adjacency(adjacency: np.ndarray) -> None:
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {adjacency.shape}")
    if not np.array_equal(adjacency, adjacency.T):
        raise ValueError("adjacency must be exactly symmetric")
    if not np.isin(adjacency, (0.0, 1.0)).all():
        raise ValueError("adjacency entries must be exactly 0 or 1")


@dataclass(frozen=True)
class Graph:
    """Dense symmetric 0/1 adjacency matrix.

    ``has_self_loops`` is True once the diagonal has been normalized to ones,
    which every generator and parser in this module does.
    """

    adjacency: np.ndarray
    n_vertices: int
    has_self_loops: bool = True

    @classmethod
    def from_adjacency(cls, adjacency, normalize_diagonal: bool = True) -> "Graph":
        adj = np.asarray(adjacency, dtype=float).copy()
        if normalize_diagonal and adj.ndim == 2 and adj.shape[0] == adj.shape[1]:
            np.fill_diagonal(adj, 1.0)
        _validate_adjacency(adj)
        loops = bool(np.all(np.diag(adj) == 1.0))
        adj.setflags(write=False)
        return cls(adjacency=adj, n_vertices=adj.shape[0], has_self_loops=loops)

    @property
    def n_edges(self) -> int:
        """Number of undirected edges, diagonal excluded."""
        a = self.adjacency
        return int((a.sum() - np.trace(a)) // 2)


@dataclass(frozen=True)
class GroundTruthPair:
    """The planted decomposition M = L* + S*.

    ``l_star`` is the rank-one 0/1 indicator of the clique block, ``s_star``
    the complementary sparse part.
    """

    l_star: np.ndarray
    s_star: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.l_star.shape[0]

    @property
    def clique_size(self) -> int:
        return int(round(np.trace(self.l_star)))

    @property
    def unit_factor(self) -> np.ndarray:
        """Unit-norm vector u with l_star = n * u u^T."""
        d = np.diag(self.l_star)
        n = d.sum()
        if n <= 0:
            raise ValueError("l_star has an empty clique block")
        return np.sqrt(d / n)

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of supp(S*)."""
        return self.s_star != 0

    def sparsity_probability(self) -> float:
        """Empirical fill probability of S* over the entries outside the clique block."""
        N, n = self.n_vertices, self.clique_size
        eligible = N * N - n * n
        if eligible == 0:
            return 0.0
        return float(np.count_nonzero(self.s_star)) / eligible


@dataclass(frozen=True)
class PlantedInstance:
    """A Bernoulli graph with an n-clique planted on ``clique_vertices``."""

    graph: Graph
    clique_vertices: frozenset = field(default_factory=frozenset)
    edge_probability: float = 0.5
    seed: int = 0

    def ground_truth(self) -> GroundTruthPair:
        N = self.graph.n_vertices
        idx = sorted(self.clique_vertices)
        l_star = np.zeros((N, N))
        l_star[np.ix_(idx, idx)] = 1.0
        s_star = self.graph.adjacency - l_star
        return GroundTruthPair(l_star=l_star, s_star=s_star)


def _symmetric_bernoulli(rng: np.random.Generator, N: int, p: float) -> np.ndarray:
    """0/1 matrix with iid Bernoulli(p) strict upper triangle mirrored below."""
    draw = (rng.random((N, N)) < p).astype(float)
    upper = np.triu(draw, 1)
    return upper + upper.T


def generate_planted(N: int, n: int, p: float, seed: int, shuffle: bool = False) -> PlantedInstance:
    """Plant an n-clique on vertices {0..n-1} of a G(N, p) background.

    Every unordered pair outside the clique block carries an edge independently
    with probability p; the diagonal is set to one. With ``shuffle`` the vertex
    labels are permuted under the same seed, so the clique lands on a random
    vertex set.
    """
    if not (1 <= n <= N):
        raise ValueError(f"clique size n={n} must satisfy 1 <= n <= N={N}")
    if not (0.0 < p < 1.0):
        raise ValueError(f"edge probability p={p} must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    adj = _symmetric_bernoulli(rng, N, p)
    adj[:n, :n] = 1.0
    np.fill_diagonal(adj, 1.0)
    clique = np.arange(n)
    if shuffle:
        perm = rng.permutation(N)
        adj = adj[np.ix_(perm, perm)]
        clique = np.where(np.isin(perm, clique))[0]
    return PlantedInstance(
        graph=Graph.from_adjacency(adj, normalize_diagonal=False),
        clique_vertices=frozenset(int(v) for v in clique),
        edge_probability=p,
        seed=seed,
    )


def generate_bernoulli_symmetric(N: int, p: float, seed: int) -> Graph:
    """Symmetric Bernoulli(p) graph with unit diagonal and no planted structure."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"edge probability p={p} must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    adj = _symmetric_bernoulli(rng, N, p)
    np.fill_diagonal(adj, 1.0)
    return Graph.from_adjacency(adj, normalize_diagonal=False)


def parse_dimacs(text) -> Graph:
    """Parse DIMACS clique format: `c` comments, one `p edge N M` line, `e i j` edges.

    Vertex indices are 1-based in the file. Duplicate edges are idempotent,
    node lines and edge weights are ignored with a warning, and the diagonal is
    forced to one.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    n_vertices = None
    adj = None
    warned_weights = False
    warned_nodes = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "p":
            if n_vertices is not None:
                raise DimacsParseError(f"line {lineno}: duplicate problem line")
            if len(parts) < 4:
                raise DimacsParseError(f"line {lineno}: malformed problem line {line!r}")
            try:
                n_vertices = int(parts[2])
                int(parts[3])
            except ValueError:
                raise DimacsParseError(f"line {lineno}: malformed problem line {line!r}") from None
            if n_vertices <= 0:
                raise DimacsParseError(f"line {lineno}: non-positive vertex count")
            adj = np.zeros((n_vertices, n_vertices))
        elif tag == "e":
            if adj is None:
                raise DimacsParseError(f"line {lineno}: edge before problem line")
            if len(parts) < 3:
                raise DimacsParseError(f"line {lineno}: malformed edge line {line!r}")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise DimacsParseError(f"line {lineno}: malformed edge line {line!r}") from None
            if len(parts) > 3 and not warned_weights:
                warnings.warn("DIMACS edge weights present; ignoring them", stacklevel=2)
                warned_weights = True
            if not (1 <= i <= n_vertices and 1 <= j <= n_vertices):
                raise DimacsParseError(
                    f"line {lineno}: vertex index out of range in {line!r} (N={n_vertices})"
                )
            adj[i - 1, j - 1] = 1.0
            adj[j - 1, i - 1] = 1.0
        elif tag == "n":
            if not warned_nodes:
                warnings.warn("DIMACS node lines present; ignoring them", stacklevel=2)
                warned_nodes = True
        else:
            raise DimacsParseError(f"line {lineno}: unrecognized line {line!r}")
    if adj is None:
        raise DimacsParseError("missing problem line (`p edge N M`)")
    np.fill_diagonal(adj, 1.0)
    return Graph.from_adjacency(adj, normalize_diagonal=False)


def load_dimacs(path) -> Graph:
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read())


def graph_to_json(graph: Graph) -> dict:
    """{"n": N, "edges": [[i, j], ...]} with 0-based i < j, diagonal excluded."""
    a = graph.adjacency
    ii, jj = np.nonzero(np.triu(a, 1))
    return {"n": graph.n_vertices, "edges": [[int(i), int(j)] for i, j in zip(ii, jj)]}


def graph_from_json(doc: dict) -> Graph:
    if "n" not in doc or "edges" not in doc:
        raise ValueError("graph JSON document needs 'n' and 'edges' keys")
    N = int(doc["n"])
    if N <= 0:
        raise ValueError(f"vertex count must be positive, got {N}")
    adj = np.zeros((N, N))
    for k, pair in enumerate(doc["edges"]):
        i, j = int(pair[0]), int(pair[1])
        if not (0 <= i < N and 0 <= j < N):
            raise ValueError(f"edge {k} = ({i}, {j}) out of range for n={N}")
        adj[i, j] = 1.0
        adj[j, i] = 1.0
    np.fill_diagonal(adj, 1.0)
    return Graph.from_adjacency(adj, normalize_diagonal=False)


def load_graph_json(path) -> Graph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))
