"""Layer-aware random walks over a multiplex graph.

Implements five transition kernels over (node, layer) states:

* ``classical``  -- stay/switch/step masses divided by the node's total
  strength in its current layer.
* ``diffusive``  -- same masses divided by the global maximum strength,
  with the leftover probability spent on staying put.
* ``physical``   -- never stays in place; steps within or across layers
  with mass proportional to edge weight, discounted by the coupling
  toward the destination layer.
* ``multinet``   -- picks a layer uniformly among the layers where the
  current node is active, then a neighbor uniformly in that layer.
* ``uniform``    -- single-layer walk, neighbor chosen proportionally to
  edge weight (plain uniform choice on unweighted graphs). Used for the
  collapsed-graph baseline.

Walks start once per (layer, active node, repetition) triple and record
node identities only; the layer component steers sampling but is erased
from the output. Each walk draws from an independent sub-seeded
generator, so corpora are reproducible for a fixed seed regardless of
how the walk tasks would be scheduled.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import DeadEnd, InvalidStartError, ParseError, ValidationError
from .mgraph import MultiplexGraph, StrengthTable

__all__ = [
    "WalkStrategy",
    "WalkConfig",
    "WalkState",
    "WalkCorpus",
    "TransitionSampler",
    "transition_row",
    "multiwalk",
    "generate_corpus",
    "load_corpus",
]


class WalkStrategy(Enum):
    """Transition-kernel selector; values double as CLI/file tokens."""

    CLASSICAL = "classical"
    DIFFUSIVE = "diffusive"
    PHYSICAL = "physical"
    MULTINET_UNIFORM = "multinet"
    SINGLE_LAYER_UNIFORM = "uniform"

    @classmethod
    def from_token(cls, token: str) -> "WalkStrategy":
        for member in cls:
            if member.value == token:
                return member
        raise ValidationError(f"unknown strategy {token!r}; expected one of "
                              f"{[m.value for m in cls]}")


@dataclass(frozen=True)
class WalkConfig:
    walk_length: int = 10
    walks_per_node: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.walk_length < 1:
            raise ValidationError("walk_length must be >= 1")
        if self.walks_per_node < 1:
            raise ValidationError("walks_per_node must be >= 1")


class WalkState(NamedTuple):
    node: int
    layer: int


def transition_row(g: MultiplexGraph, st: StrengthTable, strategy: WalkStrategy,
                   state) -> list[tuple[WalkState, float]]:
    """All positive-probability next states from ``state``.

    Returns (target, probability) pairs in a canonical order (stay,
    layer switches, then steps grouped by ascending layer and neighbor
    index). Rows sum to 1: the physical and single-layer kernels divide
    by a measured normalizing constant, the others are normalized by
    construction.

    Raises ``DeadEnd`` when the state has no outgoing mass, which for
    the strength-based kernels includes any state whose node has no
    neighbors in the state's layer.
    """
    node, layer = state
    if not 0 <= node < g.num_nodes:
        raise IndexError(f"node {node} out of range")
    if not 0 <= layer < g.num_layers:
        raise IndexError(f"layer {layer} out of range")

    targets: list[WalkState] = []
    masses: list[float] = []

    if strategy is WalkStrategy.MULTINET_UNIFORM:
        active = g.active_layers(node)
        if active.size == 0:
            raise DeadEnd(f"node {node} has no neighbors in any layer")
        n_active = active.size
        for gamma in active.tolist():
            nbrs, _ = g.neighbor_arrays(node, gamma)
            p = 1.0 / (n_active * nbrs.size)
            for j in nbrs.tolist():
                targets.append(WalkState(j, gamma))
                masses.append(p)
    elif strategy is WalkStrategy.SINGLE_LAYER_UNIFORM:
        if g.num_layers != 1:
            raise ValidationError("the uniform strategy requires a single-layer graph")
        nbrs, w = g.neighbor_arrays(node, layer)
        if nbrs.size == 0:
            raise DeadEnd(f"node {node} has no neighbors")
        for j, wij in zip(nbrs.tolist(), w.tolist()):
            targets.append(WalkState(j, layer))
            masses.append(wij)
    elif strategy in (WalkStrategy.CLASSICAL, WalkStrategy.DIFFUSIVE):
        if not g.present(node, layer):
            raise DeadEnd(f"node {node} has no neighbors in layer {layer}")
        denom = (st.total_strength[layer, node]
                 if strategy is WalkStrategy.CLASSICAL else st.s_max)
        if strategy is WalkStrategy.CLASSICAL:
            stay = g.coupling(node, layer, layer) / denom
        else:
            stay = (st.s_max + g.coupling(node, layer, layer)
                    - st.total_strength[layer, node]) / denom
        if stay > 0:
            targets.append(WalkState(node, layer))
            masses.append(stay)
        for beta in range(g.num_layers):
            if beta == layer:
                continue
            d = g.coupling(node, layer, beta)
            if d > 0:
                targets.append(WalkState(node, beta))
                masses.append(d / denom)
        nbrs, w = g.neighbor_arrays(node, layer)
        for j, wij in zip(nbrs.tolist(), w.tolist()):
            targets.append(WalkState(j, layer))
            masses.append(wij / denom)
    elif strategy is WalkStrategy.PHYSICAL:
        intra = st.intra_strength[layer, node]
        if intra <= 0:
            raise DeadEnd(f"node {node} has no neighbors in layer {layer}")
        for beta in g.active_layers(node).tolist():
            d = g.coupling(node, layer, beta)
            if d <= 0:
                continue
            factor = d / intra
            s_beta = st.total_strength[beta, node]
            nbrs, w = g.neighbor_arrays(node, beta)
            for j, wij in zip(nbrs.tolist(), w.tolist()):
                targets.append(WalkState(j, beta))
                masses.append((wij / s_beta) * factor)
    else:  # pragma: no cover - exhaustive enum
        raise ValidationError(f"unhandled strategy {strategy}")

    assert not masses or min(masses) >= 0.0, "negative transition mass"
    total = float(sum(masses))
    if total <= 0:
        raise DeadEnd(f"state ({node}, {layer}) has zero outgoing mass")
    if strategy in (WalkStrategy.PHYSICAL, WalkStrategy.SINGLE_LAYER_UNIFORM):
        # These two need the normalizing constant; the other kernels
        # emit masses that already sum to 1 by construction, and
        # dividing would perturb their exact values by an ulp.
        return [(t, m / total) for t, m in zip(targets, masses)]
    return list(zip(targets, masses))


class TransitionSampler:
    """Precomputed cumulative-probability tables for one (graph, strategy).

    Rows are built once from :func:`transition_row`, so every strategy
    pays the same per-step cost: one uniform draw plus a binary search.
    The multinet kernel is layer-independent, so its rows are keyed by
    node alone.
    """

    def __init__(self, g: MultiplexGraph, st: StrengthTable, strategy: WalkStrategy):
        self.graph = g
        self.strategy = strategy
        self._rows = {}
        per_node = strategy is WalkStrategy.MULTINET_UNIFORM
        for node in range(g.num_nodes):
            if per_node:
                if g.active_layers(node).size == 0:
                    continue
                layer = int(g.active_layers(node)[0])
                self._rows[node] = self._pack(transition_row(g, st, strategy,
                                                             (node, layer)))
            else:
                for layer in g.active_layers(node).tolist():
                    key = (node, layer)
                    self._rows[key] = self._pack(transition_row(g, st, strategy, key))

    @staticmethod
    def _pack(row):
        nodes = np.asarray([t.node for t, _p in row], dtype=np.int64)
        layers = np.asarray([t.layer for t, _p in row], dtype=np.int64)
        cum = np.cumsum([p for _t, p in row])
        cum[-1] = 1.0  # guard fp drift at the top end
        return nodes, layers, cum

    def step(self, node: int, layer: int, rng) -> tuple[int, int]:
        """Sample the successor of (node, layer); raises DeadEnd."""
        if self.strategy is WalkStrategy.MULTINET_UNIFORM:
            row = self._rows.get(node)
        else:
            row = self._rows.get((node, layer))
            if row is None:
                # Dead-end state: resample the layer uniformly among the
                # layers where the node can continue.
                active = self.graph.active_layers(node)
                if active.size == 0:
                    raise DeadEnd(f"node {node} is isolated everywhere")
                layer = int(active[rng.integers(active.size)])
                row = self._rows[(node, layer)]
        if row is None:
            raise DeadEnd(f"node {node} is isolated everywhere")
        nodes, layers, cum = row
        k = int(np.searchsorted(cum, rng.random(), side="right"))
        if k == cum.size:
            k -= 1
        return int(nodes[k]), int(layers[k])


def multiwalk(g: MultiplexGraph, st: StrengthTable, strategy: WalkStrategy,
              start, walk_length: int, rng, sampler: TransitionSampler | None = None):
    """Simulate one walk of up to ``walk_length`` steps from ``start``.

    Returns the node sequence (length walk_length + 1, shorter only when
    the walk hits a node that is isolated in every layer). The start
    node must have at least one neighbor in the start layer.
    """
    node, layer = start
    if not g.present(node, layer):
        raise InvalidStartError(
            f"node {node} has no neighbors in layer {layer}")
    if sampler is None:
        sampler = TransitionSampler(g, st, strategy)
    seq = [node]
    for _ in range(walk_length):
        try:
            node, layer = sampler.step(node, layer, rng)
        except DeadEnd:
            break
        seq.append(node)
    return seq


def _walk_seed(seed: int, layer: int, node: int, rep: int) -> int:
    """Stable 64-bit sub-seed for one (layer, node, repetition) walk."""
    payload = struct.pack("<Qqqq", seed & 0xFFFFFFFFFFFFFFFF, layer, node, rep)
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


@dataclass
class WalkCorpus:
    """Walk sequences (dense node indices) plus provenance metadata."""

    walks: list
    tokens: list
    strategy: WalkStrategy
    config: WalkConfig
    graph_fingerprint: str = ""

    def __len__(self):
        return len(self.walks)

    def token_walks(self):
        """Walks with dense indices replaced by external tokens."""
        toks = self.tokens
        return [[toks[i] for i in walk] for walk in self.walks]

    def save(self, path, strategy_token: str | None = None):
        token = strategy_token or self.strategy.value
        cfg = self.config
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# strategy={token} l={cfg.walk_length} "
                     f"n={cfg.walks_per_node} seed={cfg.seed}\n")
            fh.write(f"# graph={self.graph_fingerprint}\n")
            toks = self.tokens
            for walk in self.walks:
                fh.write(" ".join(toks[i] for i in walk))
                fh.write("\n")


def generate_corpus(g: MultiplexGraph, st: StrengthTable, strategy: WalkStrategy,
                    cfg: WalkConfig) -> WalkCorpus:
    """Run ``walks_per_node`` walks from every active node of every layer.

    Walk order is (layer, node, repetition) ascending; each walk uses an
    independent generator seeded from (seed, layer, node, repetition),
    so the corpus is byte-stable for a fixed seed.
    """
    if g.num_edges() == 0:
        raise ValidationError("cannot generate walks on an edgeless graph")
    sampler = TransitionSampler(g, st, strategy)
    walks = []
    for layer in range(g.num_layers):
        for node in g.nodes_in_layer(layer).tolist():
            for rep in range(cfg.walks_per_node):
                rng = np.random.default_rng(_walk_seed(cfg.seed, layer, node, rep))
                walks.append(multiwalk(g, st, strategy, (node, layer),
                                       cfg.walk_length, rng, sampler))
    return WalkCorpus(walks=walks, tokens=list(g.tokens), strategy=strategy,
                      config=cfg, graph_fingerprint=g.fingerprint())


def load_corpus(path):
    """Read a corpus file; returns (token walks, header metadata dict)."""
    walks = []
    meta = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for part in line[1:].split():
                    if "=" in part:
                        key, _, value = part.partition("=")
                        meta[key] = value
                continue
            walks.append(line.split())
    if not walks:
        raise ParseError(1, f"{path}: corpus contains no walks")
    return walks, meta
