#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixtures under data/.

Both files are seeded, so reruns are byte-identical:

* celegans_profile.edges -- 3 layers / 279 nodes / 5,863 edges, the
  size profile of the C. Elegans neuronal multiplex (layer sizes
  514 / 888 / 4461).
* synthetic_2layer.edges -- small 2-layer demo where layer 1 is a
  noisy copy of layer 0; good for a quick pipeline run.
"""

import os

import numpy as np

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def sample_pairs(rng, n_nodes, n_edges, forbidden=(), nodes=None):
    """Distinct undirected pairs over ``nodes`` (default: range(n_nodes))."""
    pool = np.arange(n_nodes) if nodes is None else np.asarray(nodes)
    pairs = set()
    forbidden = set(forbidden)
    while len(pairs) < n_edges:
        a, b = pool[rng.integers(pool.size, size=2)]
        if a == b:
            continue
        pair = (min(a, b), max(a, b))
        if pair in forbidden:
            continue
        pairs.add(pair)
    return sorted(pairs)


def write_edges(path, layers):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# synthetic fixture; regenerate with scripts/make_fixtures.py\n")
        for layer, pairs in enumerate(layers):
            for a, b in pairs:
                fh.write(f"{layer} n{a} n{b}\n")


def celegans_profile(seed=101):
    """3 layers totalling 5,863 edges over 279 nodes, every node covered.

    Each sparse layer lives on a node subset, mirroring how real
    multiplex layers involve only part of the node universe.
    """
    rng = np.random.default_rng(seed)
    n = 279
    layer_sizes = (514, 888, 4461)
    subset_sizes = (160, 210, 279)
    layers = []
    for size, subset in zip(layer_sizes, subset_sizes):
        nodes = np.sort(rng.choice(n, size=subset, replace=False))
        layers.append(sample_pairs(rng, n, size, nodes=nodes))
    covered = {v for pairs in layers for p in pairs for v in p}
    missing = sorted(set(range(n)) - covered)
    for v in missing:  # swap an edge of the big layer to cover stragglers
        a, b = layers[2].pop()
        layers[2].append((min(v, a), max(v, a)))
    assert sum(len(p) for p in layers) == sum(layer_sizes)
    return layers


def synthetic_2layer(seed=202, n=60, m=240, noise=0.1):
    rng = np.random.default_rng(seed)
    base = sample_pairs(rng, n, m)
    n_swap = int(noise * m)
    drop = set(rng.choice(m, size=n_swap, replace=False).tolist())
    copy = [p for k, p in enumerate(base) if k not in drop]
    copy += sample_pairs(rng, n, n_swap, forbidden=set(base) | set(copy))
    return [base, sorted(copy)]


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    write_edges(os.path.join(OUT_DIR, "celegans_profile.edges"), celegans_profile())
    write_edges(os.path.join(OUT_DIR, "synthetic_2layer.edges"), synthetic_2layer())
    print(f"fixtures written to {os.path.abspath(OUT_DIR)}")


if __name__ == "__main__":
    main()
