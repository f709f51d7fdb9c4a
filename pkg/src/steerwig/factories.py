"""Constructors for noisy EPR states and graph states, plus edge-list loading."""

import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GraphFormatError, SteerwigError
from .state import GaussianState, beamsplitter

log = logging.getLogger(__name__)


def db_to_ratio(db):
    """Squeezing in dB to a variance ratio, ``10 ** (dB / 10)``."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def ratio_to_db(s):
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise SteerwigError("squeezing ratio must be positive")
    return 10.0 * np.log10(s)


def _check_params(n, *squeezings):
    if not np.isfinite(n) or n < 1.0:
        raise SteerwigError(f"thermal noise factor must be >= 1, got {n}")
    for s in squeezings:
        if not np.isfinite(s) or s <= 0:
            raise SteerwigError(f"squeezing ratio must be positive, got {s}")


def epr_state(s1, s2, n=1.0):
    """Two squeezed thermal modes mixed on a balanced beamsplitter.

    The inputs have covariances ``diag(n s1, n / s1)`` and ``diag(n / s2, n s2)``;
    ``s1`` and ``s2`` are variance ratios (see :func:`db_to_ratio`).
    """
    _check_params(n, s1, s2)
    V = np.diag([n * s1, n / s1, n / s2, n * s2])
    return beamsplitter(GaussianState(V), 0, 1, 0.5)


@dataclass(frozen=True, eq=False)
class Graph:
    adjacency: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.adjacency)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise GraphFormatError(f"adjacency must be a non-empty square matrix, got {A.shape}")
        if not np.all((A == 0) | (A == 1)):
            raise GraphFormatError("adjacency entries must be 0 or 1")
        if not np.array_equal(A, A.T):
            raise GraphFormatError("adjacency matrix is not symmetric")
        if np.any(np.diag(A) != 0):
            raise GraphFormatError("adjacency matrix has self-loops")
        A = A.astype(float)
        A.setflags(write=False)
        object.__setattr__(self, "adjacency", A)

    @classmethod
    def from_edges(cls, edges, m=None):
        """Build from 0-based vertex pairs."""
        edges = list(edges)
        top = max((max(e) for e in edges), default=-1) + 1
        m = top if m is None else m
        if m < top:
            raise GraphFormatError(f"edge references vertex {top} but only {m} vertices declared")
        A = np.zeros((m, m), dtype=int)
        for a, b in edges:
            if a == b:
                raise GraphFormatError(f"self-loop at vertex {a + 1}")
            A[a, b] = A[b, a] = 1
        return cls(A)

    @property
    def m(self):
        return self.adjacency.shape[0]

    @property
    def edges(self):
        i, j = np.nonzero(np.triu(self.adjacency))
        return list(zip(i.tolist(), j.tolist()))

    def permuted(self, perm):
        perm = np.asarray(perm)
        return Graph(self.adjacency[np.ix_(perm, perm)].astype(int))


def _sym_inv_sqrt(M):
    w, U = np.linalg.eigh(M)
    return (U / np.sqrt(w)) @ U.T


def graph_state(graph, s, n=1.0):
    """Equally squeezed thermal modes entangled according to ``graph``.

    With ``X = (A^2 + 1)^{-1/2}`` and ``Y = A X``, the blockwise covariance is
    ``[[X, Y], [-Y, X]] D [[X, -Y], [Y, X]]`` with ``D = diag(n s, ..., n / s, ...)``.
    """
    if not isinstance(graph, Graph):
        graph = Graph(graph)
    _check_params(n, s)
    A = graph.adjacency
    m = graph.m
    X = _sym_inv_sqrt(A @ A + np.eye(m))
    Y = A @ X
    U = np.block([[X, Y], [-Y, X]])
    D = np.diag(np.concatenate([np.full(m, n * s), np.full(m, n / s)]))
    return GaussianState.from_blockwise(U @ D @ U.T)


_VERTICES = re.compile(r"^vertices\s+(\d+)$")


def parse_graph(text, source="<string>"):
    """Parse the edge-list format: one ``i j`` pair (1-based) per line.

    ``#`` starts a comment line; an optional ``vertices <m>`` line declares
    trailing isolated vertices. Duplicate edges are collapsed with a warning.
    """
    edges = []
    seen = set()
    declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _VERTICES.match(line)
        if match:
            declared = int(match.group(1))
            continue
        parts = line.split()
        try:
            if len(parts) != 2:
                raise ValueError
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"{source}:{lineno}: expected two vertex indices, got {line!r}") from None
        if a < 1 or b < 1:
            raise GraphFormatError(f"{source}:{lineno}: vertex indices are 1-based, got {line!r}")
        if a == b:
            raise GraphFormatError(f"{source}:{lineno}: self-loop at vertex {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            log.warning("%s:%d: duplicate edge %d-%d ignored", source, lineno, *key)
            continue
        seen.add(key)
        edges.append((a - 1, b - 1))
    if not edges and declared is None:
        raise GraphFormatError(f"{source}: no edges or vertex declaration found")
    return Graph.from_edges(edges, m=declared)


def load_graph(path):
    path = Path(path)
    return parse_graph(path.read_text(encoding="utf-8"), source=str(path))


# Six-mode tree: chain 1-2-3-4 plus branch 2-5-6. Vertex 4 is a leaf on 3;
# subtracting in 4 and reading out 3 is the graph-state case study pair.
SIX_MODE_TREE = """\
1 2
2 3
3 4
2 5
5 6
"""
SIX_MODE_TREE_PAIR = (2, 3)  # (f, g), 0-based
