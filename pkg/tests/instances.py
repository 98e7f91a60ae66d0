"""Standard benchmark instances, generated from their definitions.

Queen graphs connect chessboard squares that share a row, column, or
diagonal.  The myciel family applies the triangle-free chromatic-number
-raising construction repeatedly, starting from a single edge.
"""

from __future__ import annotations

import numpy as np

from quditcolor.graph import Graph


def queen_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    edges = []
    for a in range(rows * cols):
        ra, ca = divmod(a, cols)
        for b in range(a + 1, rows * cols):
            rb, cb = divmod(b, cols)
            if ra == rb or ca == cb or abs(ra - rb) == abs(ca - cb):
                edges.append((a, b))
    return edges


def mycielskian(num_nodes: int, edges: list[tuple[int, int]]):
    """One construction step: nodes v_i keep their edges, shadows u_i attach
    to the neighbors of v_i, and an apex node attaches to every shadow."""
    n = num_nodes
    out = list(edges)
    for u, v in edges:
        out.append((u, n + v))
        out.append((v, n + u))
    apex = 2 * n
    out.extend((n + i, apex) for i in range(n))
    return 2 * n + 1, out


def myciel_edges(k: int) -> tuple[int, list[tuple[int, int]]]:
    """Start from a single edge and apply the construction k-1 times
    (myciel3 is the 11-node, 20-edge graph; chromatic number is k+1)."""
    if k < 2:
        raise ValueError("myciel index must be >= 2")
    num_nodes, edges = 2, [(0, 1)]
    for _ in range(k - 1):
        num_nodes, edges = mycielskian(num_nodes, edges)
    return num_nodes, edges


def queen_graph(rows: int, cols: int) -> Graph:
    return Graph.from_edges(rows * cols, queen_edges(rows, cols))


def myciel_graph(k: int) -> Graph:
    num_nodes, edges = myciel_edges(k)
    return Graph.from_edges(num_nodes, edges)


def to_col_text(num_nodes: int, edges) -> str:
    lines = [f"p edge {num_nodes} {len(edges)}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in edges]
    return "\n".join(lines) + "\n"


def queen_col_text(rows: int, cols: int) -> str:
    return to_col_text(rows * cols, queen_edges(rows, cols))


def myciel_col_text(k: int) -> str:
    return to_col_text(*myciel_edges(k))


def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(center: int, leaves: list[int]) -> Graph:
    nodes = 1 + len(leaves)
    return Graph.from_edges(nodes, [(center, leaf) for leaf in leaves])


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi with isolated nodes patched by chaining them in."""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.uniform() < p]
    present = {v for e in edges for v in e}
    for i in range(n):
        if i not in present:
            j = (i + 1) % n
            edges.append((min(i, j), max(i, j)))
            present.update((i, j))
    return Graph.from_edges(n, edges)
