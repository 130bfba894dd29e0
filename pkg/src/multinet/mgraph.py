"""Multiplex graph data model and edge-list I/O.

A multiplex graph is a set of layers over one shared node universe. Nodes
are identified externally by opaque string tokens and internally by dense
integer indices; layers by dense integer indices. Per-layer adjacency is
stored as sorted neighbor/weight arrays, which makes the graph cheap to
read concurrently and keeps neighbor enumeration deterministic.

Edge-list file format (one edge per line, ``#`` comments ignored)::

    layer_id src_token dst_token [weight]

Duplicate edges within a layer merge by summing weights; listing both
orientations of an undirected edge therefore doubles its weight.
Self-loops are dropped (and counted), zero-weight edges are skipped.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

__all__ = [
    "MultiplexGraph",
    "StrengthTable",
    "load_multiplex",
    "save_multiplex",
    "collapse",
    "strengths",
]


class MultiplexGraph:
    """Immutable multiplex graph over a shared node universe.

    Attributes
    ----------
    tokens: list of str
        External node tokens; position is the dense node index.
    num_layers: int
        Number of layers (>= 1).
    directed: bool
        Uniform across layers.
    weighted: bool
        False means every stored weight is 1.0.
    coupling_weight: float
        Inter-layer switching weight: the coupling between two layers at
        a node is this value when the node has degree >= 1 in both
        layers, else 0.
    dropped_self_loops: int
        Count of input self-loops discarded during construction.
    """

    def __init__(self, edges, num_layers, directed=False, weighted=False,
                 tokens=None, coupling_weight=1.0, dropped_self_loops=0):
        """Build a graph from an iterable of (layer, src, dst, weight).

        ``tokens``, when given, fixes the dense index order and must cover
        every endpoint; otherwise indices are assigned by first appearance
        in the edge stream. Duplicate edges merge by summing weights;
        self-loops and zero-weight edges are skipped.
        """
        if num_layers < 1:
            raise ValidationError("a multiplex graph needs at least one layer")
        self.directed = bool(directed)
        self.weighted = bool(weighted)
        self.num_layers = int(num_layers)
        self.coupling_weight = float(coupling_weight)
        self.dropped_self_loops = int(dropped_self_loops)

        self._frozen_universe = tokens is not None
        if tokens is None:
            self.tokens = []
            self.token_index = {}
        else:
            self.tokens = list(tokens)
            self.token_index = {t: i for i, t in enumerate(self.tokens)}
            if len(self.token_index) != len(self.tokens):
                raise ValidationError("duplicate tokens in node universe")

        merged = [dict() for _ in range(self.num_layers)]
        for layer, src, dst, weight in edges:
            if not 0 <= layer < self.num_layers:
                raise ValidationError(f"layer {layer} out of range [0, {self.num_layers})")
            if weight < 0:
                raise ValidationError(f"negative edge weight {weight}")
            if src == dst:
                self.dropped_self_loops += 1
                continue
            if weight == 0:
                continue
            i = self._intern(src)
            j = self._intern(dst)
            if not self.directed and i > j:
                i, j = j, i
            key = (i, j)
            merged[layer][key] = merged[layer].get(key, 0.0) + float(weight)

        n = len(self.tokens)
        self._build_adjacency(merged, n)

    def _intern(self, token):
        idx = self.token_index.get(token)
        if idx is None:
            if self._frozen_universe:
                raise ValidationError(f"token {token!r} is not in the node universe")
            idx = self.token_index[token] = len(self.tokens)
            self.tokens.append(token)
        return idx

    def _build_adjacency(self, merged, n):
        nbrs = [[[] for _ in range(n)] for _ in range(self.num_layers)]
        wgts = [[[] for _ in range(n)] for _ in range(self.num_layers)]
        self._layer_edges = np.zeros(self.num_layers, dtype=np.int64)
        for layer, pairs in enumerate(merged):
            self._layer_edges[layer] = len(pairs)
            for (i, j), w in pairs.items():
                nbrs[layer][i].append(j)
                wgts[layer][i].append(w)
                if not self.directed:
                    nbrs[layer][j].append(i)
                    wgts[layer][j].append(w)
        self._nbr = []
        self._wgt = []
        self._deg = np.zeros((self.num_layers, n), dtype=np.int64)
        for layer in range(self.num_layers):
            row_n, row_w = [], []
            for i in range(n):
                idx = np.asarray(nbrs[layer][i], dtype=np.int64)
                w = np.asarray(wgts[layer][i], dtype=np.float64)
                order = np.argsort(idx)
                row_n.append(idx[order])
                row_w.append(w[order])
                self._deg[layer, i] = idx.size
            self._nbr.append(row_n)
            self._wgt.append(row_w)
        self._active = [np.flatnonzero(self._deg[:, i]).astype(np.int64)
                        for i in range(n)]

    # -- basic readback ---------------------------------------------------

    @property
    def num_nodes(self):
        return len(self.tokens)

    def num_edges(self, layer=None):
        """Stored edge count (undirected pairs counted once)."""
        if layer is None:
            return int(self._layer_edges.sum())
        return int(self._layer_edges[layer])

    def degree(self, node, layer):
        return int(self._deg[layer, node])

    def present(self, node, layer):
        """True when the node has at least one neighbor in the layer."""
        return self._deg[layer, node] > 0

    def active_layers(self, node):
        """Layers where the node has degree >= 1, ascending."""
        return self._active[node]

    def nodes_in_layer(self, layer):
        """Dense indices of nodes with degree >= 1 in the layer, ascending."""
        return np.flatnonzero(self._deg[layer])

    def neighbors(self, node, layer):
        """Adjacency list of ``node`` in ``layer`` as (index, weight) pairs,
        ascending by neighbor index."""
        idx, w = self.neighbor_arrays(node, layer)
        return list(zip(idx.tolist(), w.tolist()))

    def neighbor_arrays(self, node, layer):
        if not 0 <= layer < self.num_layers:
            raise IndexError(f"layer {layer} out of range")
        if not 0 <= node < self.num_nodes:
            raise IndexError(f"node {node} out of range")
        return self._nbr[layer][node], self._wgt[layer][node]

    def coupling(self, node, layer_a, layer_b):
        """Inter-layer switching weight at ``node`` between two layers."""
        if self._deg[layer_a, node] > 0 and self._deg[layer_b, node] > 0:
            return self.coupling_weight
        return 0.0

    def iter_edges(self):
        """Yield (layer, src_token, dst_token, weight) in canonical order.

        Undirected edges are yielded once, with src index < dst index.
        """
        for layer in range(self.num_layers):
            for i in range(self.num_nodes):
                idx, w = self._nbr[layer][i], self._wgt[layer][i]
                for j, wij in zip(idx.tolist(), w.tolist()):
                    if self.directed or i < j:
                        yield layer, self.tokens[i], self.tokens[j], wij

    def select_layers(self, keep):
        """New graph containing only the given layers, re-densified.

        Layers are renumbered to 0..len(keep)-1 in the given order and
        the node universe shrinks to nodes incident to a kept edge.
        """
        keep = list(keep)
        if not keep:
            raise ValidationError("select_layers needs at least one layer")
        remap = {old: new for new, old in enumerate(keep)}
        edges = ((remap[layer], s, d, w) for layer, s, d, w in self.iter_edges()
                 if layer in remap)
        return MultiplexGraph(edges, num_layers=len(keep), directed=self.directed,
                              weighted=self.weighted,
                              coupling_weight=self.coupling_weight)

    def fingerprint(self):
        """Short content hash covering structure, weights, and flags."""
        h = hashlib.sha256()
        h.update(f"directed={self.directed} weighted={self.weighted} "
                 f"L={self.num_layers}\n".encode())
        for tok in self.tokens:
            h.update(tok.encode())
            h.update(b"\x00")
        for layer, s, d, w in self.iter_edges():
            h.update(f"{layer} {s} {d} {w!r}\n".encode())
        return h.hexdigest()[:12]

    def __repr__(self):
        return (f"MultiplexGraph(layers={self.num_layers}, nodes={self.num_nodes}, "
                f"edges={self.num_edges()}, directed={self.directed}, "
                f"weighted={self.weighted})")


@dataclass(frozen=True)
class StrengthTable:
    """Per-(layer, node) strength sums used by the transition kernels.

    ``intra_strength[layer, node]`` is the weight sum over the node's
    neighbors in that layer. ``total_strength`` adds the coupling terms
    toward every layer where the node is present (including the layer
    itself). ``s_max`` is the maximum total strength over all pairs.
    """

    intra_strength: np.ndarray
    total_strength: np.ndarray
    s_max: float


def strengths(g: MultiplexGraph) -> StrengthTable:
    """Compute intra-layer and total strengths plus their maximum."""
    n, L = g.num_nodes, g.num_layers
    intra = np.zeros((L, n))
    for layer in range(L):
        for i in range(n):
            _, w = g.neighbor_arrays(i, layer)
            if w.size:
                intra[layer, i] = w.sum()
    active_count = np.asarray([g.active_layers(i).size for i in range(n)])
    present = intra > 0
    total = intra + present * (g.coupling_weight * active_count)[None, :]
    s_max = float(total.max()) if total.size else 0.0
    return StrengthTable(intra_strength=intra, total_strength=total, s_max=s_max)


def load_multiplex(path, directed=False, weighted=False, coupling_weight=1.0):
    """Load a multiplex edge list from ``path``.

    Raw layer ids may be any non-negative integers; they are remapped to
    dense indices in ascending order. Emits a warning when the per-layer
    node sets have an empty common intersection, and when self-loops
    were dropped.

    Raises
    ------
    ParseError
        On a malformed line (names the line number).
    ValidationError
        On negative weights or an empty edge set.
    OSError
        When the file cannot be read.
    """
    raw_edges = []
    layer_ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (3, 4):
                raise ParseError(line_no, f"expected 3 or 4 fields, got {len(parts)}")
            try:
                layer = int(parts[0])
            except ValueError:
                raise ParseError(line_no, f"layer id {parts[0]!r} is not an integer") from None
            if layer < 0:
                raise ParseError(line_no, f"layer id {layer} is negative")
            weight = 1.0
            if weighted and len(parts) == 4:
                try:
                    weight = float(parts[3])
                except ValueError:
                    raise ParseError(line_no, f"weight {parts[3]!r} is not a number") from None
                if not np.isfinite(weight):
                    raise ParseError(line_no, f"weight {parts[3]!r} is not finite")
                if weight < 0:
                    raise ValidationError(f"line {line_no}: negative edge weight {weight}")
            raw_edges.append((layer, parts[1], parts[2], weight))
            layer_ids.add(layer)
    if not raw_edges:
        raise ValidationError(f"{path}: no edges found")

    layer_map = {raw: dense for dense, raw in enumerate(sorted(layer_ids))}
    edges = ((layer_map[layer], s, d, w) for layer, s, d, w in raw_edges)
    g = MultiplexGraph(edges, num_layers=len(layer_map), directed=directed,
                       weighted=weighted, coupling_weight=coupling_weight)
    if g.dropped_self_loops:
        warnings.warn(f"{path}: dropped {g.dropped_self_loops} self-loop(s)",
                      stacklevel=2)
    if g.num_layers >= 2:
        common = None
        for layer in range(g.num_layers):
            nodes = set(g.nodes_in_layer(layer).tolist())
            common = nodes if common is None else common & nodes
        if not common:
            warnings.warn(f"{path}: per-layer node sets have empty intersection",
                          stacklevel=2)
    return g


def save_multiplex(g: MultiplexGraph, path):
    """Write the graph back out as an edge list (canonical edge order)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# layers={g.num_layers} nodes={g.num_nodes} "
                 f"directed={g.directed} weighted={g.weighted}\n")
        for layer, s, d, w in g.iter_edges():
            if g.weighted:
                fh.write(f"{layer} {s} {d} {w:.10g}\n")
            else:
                fh.write(f"{layer} {s} {d}\n")


def collapse(g: MultiplexGraph) -> MultiplexGraph:
    """Merge all layers into a single-layer graph.

    The edge set is the union over layers; parallel edges across layers
    merge by summing weights. The node universe and index order are
    preserved.
    """
    summed = {}
    for _layer, s, d, w in g.iter_edges():
        summed[(s, d)] = summed.get((s, d), 0.0) + w
    weighted = g.weighted or any(w != 1.0 for w in summed.values())
    edges = ((0, s, d, w) for (s, d), w in summed.items())
    return MultiplexGraph(edges, num_layers=1, directed=g.directed,
                          weighted=weighted, tokens=g.tokens,
                          coupling_weight=g.coupling_weight)
