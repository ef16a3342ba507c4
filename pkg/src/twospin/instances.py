"""Seeded random instances for verification sweeps.

All generators draw from a caller-supplied ``random.Random`` (Mersenne
Twister), so a seed pins the whole sweep; the test suite and the CLI's
random verification modes both document their seeds.
"""

from __future__ import annotations

import random

from .core import FieldedGraph
from .gadgets import Comb, DaryTree, GadgetTree, Star, tree_size


def random_bipartite_graph(rng: random.Random, max_vertices: int = 12,
                           max_degree: int = 5) -> tuple[FieldedGraph, list]:
    """Simple bipartite graph with bounded degrees; returns (graph, left ids).

    Fields are placeholder 1s; transforms overwrite them.
    """
    n = rng.randint(2, max_vertices)
    n_left = rng.randint(1, n - 1)
    n_right = n - n_left
    left = [f"l{i}" for i in range(n_left)]
    right = [f"r{i}" for i in range(n_right)]
    candidates = [(u, v) for u in left for v in right]
    rng.shuffle(candidates)
    degree = {v: 0 for v in left + right}
    edges = []
    p_keep = rng.uniform(0.2, 0.8)
    for u, v in candidates:
        if degree[u] >= max_degree or degree[v] >= max_degree:
            continue
        if rng.random() < p_keep:
            edges.append((u, v))
            degree[u] += 1
            degree[v] += 1
    vertices = tuple((v, 1) for v in left + right)
    return FieldedGraph(vertices, tuple(edges)), left


def random_graph(rng: random.Random, max_vertices: int = 12, field=1,
                 allow_loops: bool = True, allow_parallel: bool = True
                 ) -> FieldedGraph:
    """General multigraph with uniform fields; may include loops/parallel edges."""
    n = rng.randint(1, max_vertices)
    ids = [f"v{i}" for i in range(n)]
    p_edge = rng.uniform(0.15, 0.5)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p_edge:
                edges.append((ids[i], ids[j]))
                if allow_parallel and rng.random() < 0.08:
                    edges.append((ids[i], ids[j]))
    if allow_loops:
        for v in ids:
            if rng.random() < 0.08:
                edges.append((v, v))
    vertices = tuple((v, field) for v in ids)
    return FieldedGraph(vertices, tuple(edges))


def random_gadget_tree(rng: random.Random, max_size: int = 14) -> GadgetTree:
    """Gadget tree (no Leaf nodes) whose materialised size is at most max_size."""

    def build(budget: int) -> GadgetTree:
        kinds = ["star"]
        if budget >= 3:
            kinds.append("tree")
        if budget >= 2:
            kinds.append("comb")
        kind = rng.choice(kinds)
        if kind == "star":
            return Star(rng.randint(0, budget - 1))
        if kind == "tree":
            d = rng.randint(1, 3)
            # largest depth fitting the budget
            t, size = 0, 1
            while True:
                nxt = t + 2 if d == 1 else (d ** (t + 2) - 1) // (d - 1)
                if nxt > budget:
                    break
                t, size = t + 1, nxt
            return DaryTree(d, rng.randint(0, t))
        children = []
        remaining = budget - 1
        while remaining > 0:
            part = rng.randint(1, remaining)
            children.append(build(part))
            remaining -= tree_size(children[-1])
            if children and rng.random() < 0.35:
                break
        if not children:
            children.append(Star(0))
        return Comb(tuple(children))

    tree = build(max_size)
    assert tree_size(tree) <= max_size
    return tree
