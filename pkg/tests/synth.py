"""Synthetic multiplex builders for tests and benchmarks."""

import numpy as np

from multinet import MultiplexGraph


def random_pairs(rng, n_nodes, n_edges):
    """Distinct undirected pairs sampled uniformly."""
    pairs = set()
    while len(pairs) < n_edges:
        a, b = rng.integers(n_nodes, size=2)
        if a == b:
            continue
        pairs.add((min(a, b), max(a, b)))
    return sorted(pairs)


def random_multiplex(rng, n_nodes=12, n_layers=2, edges_per_layer=18,
                     weighted=False, coupling_weight=1.0):
    edges = []
    for layer in range(n_layers):
        for a, b in random_pairs(rng, n_nodes, edges_per_layer):
            w = float(rng.integers(1, 5)) if weighted else 1.0
            edges.append((layer, f"n{a}", f"n{b}", w))
    return MultiplexGraph(edges, num_layers=n_layers, weighted=weighted,
                          coupling_weight=coupling_weight)


def sbm_pairs(rng, n_nodes, n_blocks, p_in, p_out):
    """Community-structured undirected pairs (stochastic block model)."""
    block = np.arange(n_nodes) % n_blocks
    pairs = []
    for a in range(n_nodes):
        for b in range(a + 1, n_nodes):
            p = p_in if block[a] == block[b] else p_out
            if rng.random() < p:
                pairs.append((a, b))
    return pairs


def rewire_pairs(rng, pairs, n_nodes, fraction):
    """Replace ``fraction`` of the pairs with fresh random non-member pairs."""
    pairs = list(pairs)
    existing = set(pairs)
    n_swap = int(fraction * len(pairs))
    drop = set(rng.choice(len(pairs), size=n_swap, replace=False).tolist())
    kept = [p for k, p in enumerate(pairs) if k not in drop]
    added = []
    taken = existing | set(kept)
    while len(added) < n_swap:
        a, b = rng.integers(n_nodes, size=2)
        if a == b:
            continue
        pair = (min(a, b), max(a, b))
        if pair in taken:
            continue
        taken.add(pair)
        added.append(pair)
    return kept + added


def planted_multiplex(seed, n_nodes=200, n_blocks=8, p_in=0.35, p_out=0.005,
                      noise=0.10, null_target=False):
    """3-layer benchmark graph: the target layer 2 echoes layer 0.

    Layers 0 and 1 are independent draws over the same communities; the
    target is a rewired copy of layer 0 (or, for the null variant, a
    same-size uniformly random layer).
    """
    rng = np.random.default_rng(seed)
    layer0 = sbm_pairs(rng, n_nodes, n_blocks, p_in, p_out)
    layer1 = sbm_pairs(rng, n_nodes, n_blocks, p_in, p_out)
    if null_target:
        target = random_pairs(rng, n_nodes, len(layer0))
    else:
        target = rewire_pairs(rng, layer0, n_nodes, noise)
    edges = []
    for layer, pairs in enumerate((layer0, layer1, target)):
        edges.extend((layer, f"n{a}", f"n{b}", 1.0) for a, b in pairs)
    return MultiplexGraph(edges, num_layers=3)
