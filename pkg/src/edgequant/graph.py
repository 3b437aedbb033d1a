"""Directed-graph matrix algebra for edge agreement.

Nodes are 1-based in the public API (edge lists, files) and 0-based in the
matrices.  Every matrix stored on :class:`EdgeDecomposition` uses the
tree-first edge ordering; ``perm`` maps that ordering back to the input
edge list.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as spla
from scipy.optimize import linear_sum_assignment

from .errors import EigenFailure, GraphError, NotQuasiStronglyConnected, SingularTransform

__all__ = [
    "Digraph",
    "EdgeDecomposition",
    "SpectrumReport",
    "check_quasi_strong_connectivity",
    "decompose",
    "spectral_properties",
    "verify_similarity_block_form",
    "read_edge_list",
    "parse_edge_list",
    "random_quasi_strongly_connected",
    "ZERO_EIG_TOL",
]

ZERO_EIG_TOL = 1e-8


@dataclass(frozen=True)
class Digraph:
    """Weighted digraph with an ordered edge list.

    Parameters
    ----------
    num_nodes : int
        Number of nodes ``N``.
    edges : sequence of (tail, head, weight)
        1-based node indices; an edge ``(j, i, w)`` means node ``i`` receives
        information from node ``j`` with weight ``w``.
    """

    num_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        edges = tuple((int(t), int(h), float(w)) for t, h, w in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.num_nodes < 1:
            raise GraphError(f"num_nodes must be positive, got {self.num_nodes}")
        seen = set()
        for k, (t, h, w) in enumerate(edges, start=1):
            if not (1 <= t <= self.num_nodes and 1 <= h <= self.num_nodes):
                raise GraphError(f"edge {k} ({t}->{h}) references a node outside 1..{self.num_nodes}")
            if t == h:
                raise GraphError(f"edge {k} is a self-loop at node {t}")
            if not (w > 0 and np.isfinite(w)):
                raise GraphError(f"edge {k} ({t}->{h}) has non-positive weight {w}")
            if (t, h) in seen:
                raise GraphError(f"edge {k} duplicates {t}->{h}")
            seen.add((t, h))

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[float]], num_nodes: int | None = None) -> "Digraph":
        """Build from ``(tail, head[, weight])`` tuples; weight defaults to 1."""
        parsed = []
        for e in edges:
            if len(e) == 2:
                parsed.append((int(e[0]), int(e[1]), 1.0))
            elif len(e) == 3:
                parsed.append((int(e[0]), int(e[1]), float(e[2])))
            else:
                raise GraphError(f"edge {tuple(e)!r} must be (tail, head) or (tail, head, weight)")
        if num_nodes is None:
            num_nodes = max((max(t, h) for t, h, _ in parsed), default=0)
        return cls(num_nodes, tuple(parsed))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges])

    def incidence(self) -> np.ndarray:
        """N x L incidence matrix, +1 at the tail and -1 at the head."""
        E = np.zeros((self.num_nodes, self.num_edges))
        for k, (t, h, _) in enumerate(self.edges):
            E[t - 1, k] = 1.0
            E[h - 1, k] = -1.0
        return E

    def weighted_in_incidence(self) -> np.ndarray:
        """N x L matrix with ``-w_k`` at the head of edge k."""
        Ew = np.zeros((self.num_nodes, self.num_edges))
        for k, (_, h, w) in enumerate(self.edges):
            Ew[h - 1, k] = -w
        return Ew

    def laplacian(self) -> np.ndarray:
        """In-degree graph Laplacian ``D - A`` with ``a_ij = w`` for edge j->i."""
        return self.weighted_in_incidence() @ self.incidence().T


def _out_lists(g: Digraph) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(g.num_nodes)]
    for k, (t, _, _) in enumerate(g.edges):
        out[t - 1].append(k)
    return out


def _bfs_tree(g: Digraph, root: int, out: list[list[int]]) -> tuple[list[int], int]:
    """Breadth-first tree edges from 0-based ``root``; returns (edges, reached)."""
    visited = [False] * g.num_nodes
    visited[root] = True
    reached = 1
    tree = []
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for k in out[node]:
            head = g.edges[k][1] - 1
            if not visited[head]:
                visited[head] = True
                reached += 1
                tree.append(k)
                queue.append(head)
    return tree, reached


def check_quasi_strong_connectivity(g: Digraph) -> int | None:
    """Return the smallest 1-based root that reaches every node, or ``None``."""
    out = _out_lists(g)
    for r in range(g.num_nodes):
        if _bfs_tree(g, r, out)[1] == g.num_nodes:
            return r + 1
    return None


@dataclass(frozen=True, eq=False)
class EdgeDecomposition:
    """Spanning-tree decomposition and the derived edge-Laplacian matrices.

    All edge-indexed matrices use tree-first ordering: column ``k`` of ``E``
    is input edge ``perm[k]``.  The first ``N - 1`` columns form the spanning
    tree.
    """

    graph: Digraph
    root: int
    perm: np.ndarray
    E: np.ndarray
    E_odot_w: np.ndarray
    L_G: np.ndarray
    L_e: np.ndarray
    E_T: np.ndarray
    E_C: np.ndarray
    T_mat: np.ndarray
    R: np.ndarray
    theta_e: np.ndarray
    L_hat_e: np.ndarray
    L_hat_O: np.ndarray
    tails: np.ndarray = field(repr=False)
    heads: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    @property
    def num_edges(self) -> int:
        return self.graph.num_edges

    @property
    def num_cotree(self) -> int:
        return self.num_edges - self.num_nodes + 1

    @property
    def tree_edges(self) -> np.ndarray:
        """Input-order indices (0-based) of the spanning-tree edges."""
        return self.perm[: self.num_nodes - 1]

    def to_input_order(self, edge_values: np.ndarray, axis: int = 0) -> np.ndarray:
        """Reorder an array indexed by tree-first edges into input edge order."""
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return np.take(edge_values, inv, axis=axis)


def decompose(g: Digraph) -> EdgeDecomposition:
    """Spanning-tree decomposition of a quasi-strongly connected digraph.

    The tree is grown breadth-first from the smallest valid root, scanning
    out-edges in input order.  Tree edges are moved to the front (keeping
    their relative input order), followed by the co-tree edges.

    Raises
    ------
    NotQuasiStronglyConnected
        If no node reaches all others.
    """
    root = check_quasi_strong_connectivity(g)
    if root is None:
        raise NotQuasiStronglyConnected("digraph has no directed spanning tree")
    N = g.num_nodes
    tree, _ = _bfs_tree(g, root - 1, _out_lists(g))
    tree_set = set(tree)
    perm = np.array(sorted(tree) + [k for k in range(g.num_edges) if k not in tree_set], dtype=np.intp)

    E = g.incidence()[:, perm]
    Ew = g.weighted_in_incidence()[:, perm]
    E_T = E[:, : N - 1]
    E_C = E[:, N - 1 :]
    T_mat = np.linalg.solve(E_T.T @ E_T, E_T.T @ E_C)
    # T has entries in {0, +-1} (edge-path incidences); snap roundoff
    T_round = np.rint(T_mat)
    if np.allclose(T_mat, T_round, atol=1e-9, rtol=0):
        T_mat = T_round + 0.0
    R = np.hstack([np.eye(N - 1), T_mat])

    # orthonormal complement of the cut space: trailing columns of a full QR of E^T
    if g.num_edges > N - 1:
        Q, _, _ = spla.qr(E.T, pivoting=True, mode="full")
        theta = Q[:, N - 1 :]
    else:
        theta = np.zeros((g.num_edges, 0))

    L_hat_O = E_T.T @ Ew
    edges = [g.edges[k] for k in perm]
    return EdgeDecomposition(
        graph=g,
        root=root,
        perm=perm,
        E=E,
        E_odot_w=Ew,
        L_G=Ew @ E.T,
        L_e=E.T @ Ew,
        E_T=E_T,
        E_C=E_C,
        T_mat=T_mat,
        R=R,
        theta_e=theta,
        L_hat_e=L_hat_O @ R.T,
        L_hat_O=L_hat_O,
        tails=np.array([t - 1 for t, _, _ in edges], dtype=np.intp),
        heads=np.array([h - 1 for _, h, _ in edges], dtype=np.intp),
        weights=np.array([w for _, _, w in edges]),
    )


@dataclass(frozen=True)
class SpectrumReport:
    eig_L_G: np.ndarray
    eig_L_e: np.ndarray
    eig_L_hat_e: np.ndarray
    spectra_match: bool
    spectra_mismatch: float
    zero_count: int
    zero_count_ok: bool
    rank_L_e: int
    rank_L_e_sq: int
    index_one: bool
    hat_positive_stable: bool

    @property
    def all_ok(self) -> bool:
        return self.spectra_match and self.zero_count_ok and self.index_one and self.hat_positive_stable


def _eigvals(M: np.ndarray) -> np.ndarray:
    try:
        w = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise EigenFailure("non-finite eigenvalues")
    return w


def _drop_smallest(w: np.ndarray, count: int) -> np.ndarray:
    order = np.argsort(np.abs(w), kind="stable")
    return w[order[count:]]


def multiset_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest pairwise gap under the optimal one-to-one matching of two spectra."""
    if a.size != b.size:
        return np.inf
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def spectral_properties(d: EdgeDecomposition, tol: float = 1e-9) -> SpectrumReport:
    """Eigenvalues of L_G, L_e and the essential edge Laplacian plus consistency flags.

    Flags: the nonzero spectra of ``L_e`` and ``L_G`` coincide (within ``tol``),
    ``L_e`` has ``L - N + 1`` zero eigenvalues, zero is a semisimple eigenvalue
    of ``L_e`` (rank of ``L_e`` equals rank of its square) and the essential
    edge Laplacian is positive stable.
    """
    N, L = d.num_nodes, d.num_edges
    wG = _eigvals(d.L_G)
    we = _eigvals(d.L_e)
    wh = _eigvals(d.L_hat_e)
    zero_count = int(np.sum(np.abs(we) <= ZERO_EIG_TOL))
    gap = multiset_distance(_drop_smallest(we, L - N + 1), _drop_smallest(wG, 1))
    rank1 = int(np.linalg.matrix_rank(d.L_e))
    rank2 = int(np.linalg.matrix_rank(d.L_e @ d.L_e))
    return SpectrumReport(
        eig_L_G=wG,
        eig_L_e=we,
        eig_L_hat_e=wh,
        spectra_match=gap <= tol,
        spectra_mismatch=gap,
        zero_count=zero_count,
        zero_count_ok=zero_count == L - N + 1,
        rank_L_e=rank1,
        rank_L_e_sq=rank2,
        index_one=rank1 == rank2 == N - 1,
        hat_positive_stable=bool(np.all(wh.real > 0)),
    )


def similarity_transform(d: EdgeDecomposition) -> tuple[np.ndarray, np.ndarray]:
    """Return ``S_e = [R^T theta_e]`` and its closed-form inverse."""
    RRt = d.R @ d.R.T
    if np.linalg.cond(RRt) > 1e12:
        raise SingularTransform("R R^T is numerically singular")
    S = np.hstack([d.R.T, d.theta_e])
    S_inv = np.vstack([np.linalg.solve(RRt, d.R), d.theta_e.T])
    return S, S_inv


def verify_similarity_block_form(d: EdgeDecomposition) -> float:
    """Max deviation of ``S_e^{-1} L_e S_e`` from its upper block-triangular form.

    Checks that the bottom blocks vanish, the top-left block equals the
    essential edge Laplacian and the top-right block equals
    ``E_T^T E_odot^w theta_e``.
    """
    S, S_inv = similarity_transform(d)
    B = S_inv @ d.L_e @ S
    m = d.num_nodes - 1
    parts = [
        np.abs(B[:m, :m] - d.L_hat_e).ravel(),
        np.abs(B[:m, m:] - d.E_T.T @ d.E_odot_w @ d.theta_e).ravel(),
        np.abs(B[m:, :]).ravel(),
    ]
    return float(max((p.max() for p in parts if p.size), default=0.0))


def parse_edge_list(text: str, source: str = "<string>") -> Digraph:
    """Parse ``tail head weight`` lines (1-based, ``#`` comments).

    Errors carry ``source:line`` context.  The node count is the largest
    index mentioned.
    """
    edges = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"{source}:{lineno}: expected 'tail head weight', got {raw.strip()!r}")
        try:
            t, h, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphError(f"{source}:{lineno}: cannot parse {raw.strip()!r}") from None
        if t < 1 or h < 1:
            raise GraphError(f"{source}:{lineno}: node indices are 1-based")
        if t == h:
            raise GraphError(f"{source}:{lineno}: self-loop at node {t}")
        if not (w > 0 and np.isfinite(w)):
            raise GraphError(f"{source}:{lineno}: weight must be positive, got {parts[2]}")
        if (t, h) in seen:
            raise GraphError(f"{source}:{lineno}: duplicate edge {t}->{h} (first on line {seen[(t, h)]})")
        seen[(t, h)] = lineno
        edges.append((t, h, w))
    if not edges:
        raise GraphError(f"{source}: no edges")
    return Digraph.from_edges(edges)


def read_edge_list(path: str | os.PathLike) -> Digraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), source=str(path))


def random_quasi_strongly_connected(num_nodes: int, num_edges: int, rng: np.random.Generator,
                                    weight_range: tuple[float, float] = (0.1, 1.0)) -> Digraph:
    """Random digraph containing a directed spanning tree.

    A random arborescence is grown first, then extra distinct edges are added
    and the edge list is shuffled so the tree is not at the front.
    """
    N = num_nodes
    if not N - 1 <= num_edges <= N * (N - 1):
        raise GraphError(f"need N-1 <= L <= N(N-1), got N={N}, L={num_edges}")
    order = rng.permutation(N)
    pairs = [(int(order[int(rng.integers(i))]), int(order[i])) for i in range(1, N)]
    present = set(pairs)
    candidates = [(a, b) for a in range(N) for b in range(N) if a != b and (a, b) not in present]
    extra = rng.choice(len(candidates), size=num_edges - len(pairs), replace=False)
    pairs.extend(candidates[i] for i in extra)
    pairs = [pairs[i] for i in rng.permutation(len(pairs))]
    lo, hi = weight_range
    return Digraph(N, tuple((a + 1, b + 1, float(rng.uniform(lo, hi))) for a, b in pairs))
