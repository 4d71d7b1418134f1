import random

import pytest

from sparseview.view_graph import ViewGraph, from_edge_weights


def graph_of(edges, nodes=None):
    """ViewGraph from (u, v, w) triples; extra isolated nodes optional."""
    weights = {}
    node_set = set(nodes or [])
    for u, v, w in edges:
        weights[(min(u, v), max(u, v))] = w
        node_set.update((u, v))
    return from_edge_weights(node_set, weights)


def random_graph(rng: random.Random, n: int, p: float, max_w: int = 100) -> ViewGraph:
    edges = []
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if rng.random() < p:
                edges.append((u, v, rng.randint(1, max_w)))
    return graph_of(edges, nodes=range(1, n + 1))


def random_positions(rng: random.Random, nodes, scale: float = 10.0):
    return {
        v: (rng.uniform(-scale, scale), rng.uniform(-scale, scale), rng.uniform(-scale, scale))
        for v in nodes
    }


@pytest.fixture
def rng():
    return random.Random(1234)
