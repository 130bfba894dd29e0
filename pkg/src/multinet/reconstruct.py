"""Held-out-layer reconstruction: the embedding quality benchmark.

One layer is held out as the prediction target; embeddings are trained
on walks over the remaining layers. Edges of the target layer (label 1)
and uniformly sampled non-edges (label 0) are featurized with a binary
operator and scored by an L2-regularized logistic regression; ranking
quality is summarized as AUROC.

Only nodes that received an embedding are eligible as pair endpoints;
the number of excluded nodes is reported.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import struct
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .edgeops import EdgeOperator, edge_features
from .errors import ValidationError
from .mgraph import MultiplexGraph, collapse, strengths
from .skipgram import (EmbeddingMatrix, TrainConfig, Vocabulary, build_vocab,
                       save_embeddings, train)
from .walkers import WalkConfig, WalkStrategy, generate_corpus

__all__ = [
    "ExampleSet",
    "LogRegModel",
    "EvalReport",
    "split_target",
    "sample_examples",
    "featurize",
    "train_logreg",
    "predict_scores",
    "auroc",
    "evaluate_embeddings",
    "run_reconstruction",
    "write_report_csv",
    "format_report",
    "STAGES",
]

STAGES = ("load", "walk", "embed", "eval")

# Pipeline strategy tokens: the four multiplex kernels plus the
# collapse-then-uniform-walk baseline.
PIPELINE_STRATEGIES = ("classical", "diffusive", "physical", "multinet", "collapsed")


@dataclass
class ExampleSet:
    """Labeled node pairs, optionally carrying featurized rows."""

    pairs: list
    labels: np.ndarray
    features: np.ndarray | None = None

    def __len__(self):
        return len(self.pairs)


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    lam: float
    iterations: int = 0


@dataclass
class EvalReport:
    """Per-operator AUROC scores plus stage timings and a config echo."""

    dataset: str
    strategy: str
    aurocs: dict
    timings: dict
    config: dict = field(default_factory=dict)
    excluded_nodes: int = 0


def split_target(g: MultiplexGraph, target: int):
    """Drop the target layer; return (training graph, target edge list).

    Target edges are (src_token, dst_token) pairs in canonical order.
    """
    if g.num_layers < 2:
        raise ValidationError("need at least 2 layers to hold one out")
    if not 0 <= target < g.num_layers:
        raise ValidationError(f"target layer {target} out of range [0, {g.num_layers})")
    if g.num_edges(target) == 0:
        raise ValidationError(f"target layer {target} has no edges")
    keep = [layer for layer in range(g.num_layers) if layer != target]
    train_graph = g.select_layers(keep)
    target_edges = [(s, d) for layer, s, d, _w in g.iter_edges() if layer == target]
    return train_graph, target_edges


def _canonical(u, v, directed):
    return (u, v) if directed or u <= v else (v, u)


_ENUMERATE_PAIR_LIMIT = 250_000


def sample_examples(target_edges, eligible_tokens, ratio: float = 1.0,
                    split_fraction: float = 0.5, rng=None, directed: bool = False):
    """Build balanced train/test example sets for the target layer.

    Positives are the target edges whose endpoints are both eligible;
    negatives are distinct uniformly sampled eligible pairs that are not
    target edges, ``ratio`` per positive (reduced with a warning when
    the layer is too dense). The pool is split into train/test
    stratified by label; the two sets are disjoint as pair sets.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    eligible = list(eligible_tokens)
    eligible_set = set(eligible)

    positives = []
    seen = set()
    for u, v in target_edges:
        if u in eligible_set and v in eligible_set:
            pair = _canonical(u, v, directed)
            if pair not in seen:
                seen.add(pair)
                positives.append(pair)
    if not positives:
        raise ValidationError("no target edge has both endpoints embedded")

    m = len(eligible)
    total_pairs = m * (m - 1) if directed else m * (m - 1) // 2
    available = total_pairs - len(positives)
    wanted = int(round(ratio * len(positives)))
    if available <= 0:
        warnings.warn("target layer is complete over eligible nodes; "
                      "no non-edges exist", stacklevel=2)
        raise ValidationError("cannot sample negatives: no non-edges available")
    if wanted > available:
        warnings.warn(f"only {available} distinct non-edges available; "
                      f"reducing negative count from {wanted}", stacklevel=2)
        wanted = available

    positive_set = set(positives)
    if total_pairs <= _ENUMERATE_PAIR_LIMIT:
        pool = []
        for a in range(m):
            others = range(m) if directed else range(a + 1, m)
            for b in others:
                if a == b:
                    continue
                pair = _canonical(eligible[a], eligible[b], directed)
                if pair not in positive_set:
                    pool.append(pair)
        picks = rng.choice(len(pool), size=wanted, replace=False)
        negatives = [pool[k] for k in np.sort(picks)]
    else:
        negatives = []
        drawn = set()
        attempts = 0
        cap = 200 * wanted + 1000
        while len(negatives) < wanted:
            attempts += 1
            if attempts > cap:
                raise ValidationError("rejection sampling of non-edges stalled; "
                                      "layer too dense")
            a, b = rng.integers(m, size=2)
            if a == b:
                continue
            pair = _canonical(eligible[a], eligible[b], directed)
            if pair in positive_set or pair in drawn:
                continue
            drawn.add(pair)
            negatives.append(pair)

    def stratified_split(items):
        order = rng.permutation(len(items))
        cut = int(split_fraction * len(items))
        return ([items[k] for k in order[:cut]],
                [items[k] for k in order[cut:]])

    train_pos, test_pos = stratified_split(positives)
    train_neg, test_neg = stratified_split(negatives)
    train_set = ExampleSet(pairs=train_pos + train_neg,
                           labels=np.asarray([1] * len(train_pos) + [0] * len(train_neg)))
    test_set = ExampleSet(pairs=test_pos + test_neg,
                          labels=np.asarray([1] * len(test_pos) + [0] * len(test_neg)))
    return train_set, test_set


def featurize(examples: ExampleSet, emb: EmbeddingMatrix, vocab: Vocabulary,
              op: EdgeOperator) -> ExampleSet:
    """Return a copy of ``examples`` with operator features filled in."""
    left = np.asarray([vocab[u] for u, _v in examples.pairs], dtype=np.int64)
    right = np.asarray([vocab[v] for _u, v in examples.pairs], dtype=np.int64)
    feats = edge_features(op, emb.input_vectors[left], emb.input_vectors[right])
    return ExampleSet(pairs=examples.pairs, labels=examples.labels, features=feats)


# -- L2-regularized logistic regression -----------------------------------


def _logreg_loss_grad(X, t, w, b, lam):
    z = X @ w + b
    margins = t * z
    loss = float(np.mean(np.logaddexp(0.0, -margins)) + 0.5 * lam * (w @ w))
    coef = -t * _sigmoid(-margins) / X.shape[0]
    grad_w = X.T @ coef + lam * w
    grad_b = float(coef.sum())
    return loss, grad_w, grad_b


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def train_logreg(features: np.ndarray, labels: np.ndarray, lam: float = 1.0,
                 tol: float = 1e-6, max_iter: int = 10_000) -> LogRegModel:
    """Fit by full-batch gradient descent with backtracking line search.

    Minimizes mean logistic loss plus (lam/2)||w||^2; the bias is not
    regularized. Stops when the gradient infinity-norm drops below
    ``tol`` or after ``max_iter`` iterations.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValidationError("features and labels disagree in length")
    classes = np.unique(y)
    if classes.size < 2:
        raise ValidationError("both classes must be present to fit")
    if lam <= 0:
        raise ValidationError("lambda must be > 0")
    t = np.where(y == 1, 1.0, -1.0)

    w = np.zeros(X.shape[1])
    b = 0.0
    step = 1.0
    loss, grad_w, grad_b = _logreg_loss_grad(X, t, w, b, lam)
    iterations = 0
    while iterations < max_iter:
        if max(np.abs(grad_w).max(), abs(grad_b)) < tol:
            break
        gnorm2 = float(grad_w @ grad_w + grad_b * grad_b)
        step = min(step * 2.0, 1e6)
        accepted = False
        while step >= 1e-18:
            w_new = w - step * grad_w
            b_new = b - step * grad_b
            loss_new, gw_new, gb_new = _logreg_loss_grad(X, t, w_new, b_new, lam)
            if loss_new <= loss - 1e-4 * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # step size underflow: no further progress possible
        w, b, loss, grad_w, grad_b = w_new, b_new, loss_new, gw_new, gb_new
        iterations += 1
    return LogRegModel(weights=w, bias=b, lam=lam, iterations=iterations)


def predict_scores(model: LogRegModel, features: np.ndarray) -> np.ndarray:
    """Predicted edge probabilities."""
    return _sigmoid(np.asarray(features) @ model.weights + model.bias)


def auroc(scores, labels) -> float:
    """Rank-based AUROC; tied positive/negative pairs count one half."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ValidationError("scores and labels must be 1-d and equal length")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("AUROC needs both classes present")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(s.size)
    i = 0
    while i < s.size:
        j = i
        while j < s.size and s[order[j]] == s[order[i]]:
            j += 1
        ranks[order[i:j]] = (i + j + 1) / 2.0  # average of 1-based ranks
        i = j
    u_stat = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_stat / (n_pos * n_neg))


# -- pipeline orchestration ------------------------------------------------


def _derive_rng(seed: int, tag: str):
    payload = struct.pack("<Q", seed & 0xFFFFFFFFFFFFFFFF) + tag.encode()
    sub = int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")
    return np.random.default_rng(sub)


def evaluate_embeddings(g: MultiplexGraph, target_edges, emb: EmbeddingMatrix,
                        vocab: Vocabulary, operators, lam: float, seed: int,
                        ratio: float = 1.0, split_fraction: float = 0.5):
    """Score each operator's reconstruction AUROC for the target edges.

    Returns (aurocs dict keyed by operator token, excluded node count).
    """
    eligible = [tok for tok in vocab.tokens if tok in g.token_index]
    excluded = g.num_nodes - len(eligible)
    rng = _derive_rng(seed, "examples")
    train_set, test_set = sample_examples(target_edges, eligible, ratio=ratio,
                                          split_fraction=split_fraction, rng=rng,
                                          directed=g.directed)
    aurocs = {}
    for op in operators:
        op = op if isinstance(op, EdgeOperator) else EdgeOperator.from_token(op)
        tr = featurize(train_set, emb, vocab, op)
        te = featurize(test_set, emb, vocab, op)
        model = train_logreg(tr.features, tr.labels, lam=lam)
        aurocs[op.value] = auroc(predict_scores(model, te.features), te.labels)
    return aurocs, excluded


def run_reconstruction(g: MultiplexGraph, target: int, strategy,
                       walk_cfg: WalkConfig | None = None,
                       train_cfg: TrainConfig | None = None,
                       operators=None, lam: float = 1.0, seed: int = 0,
                       dataset: str = "", ratio: float = 1.0,
                       split_fraction: float = 0.5,
                       artifact_dir=None, load_seconds: float = 0.0) -> EvalReport:
    """Full benchmark: hold out ``target``, walk, embed, evaluate.

    ``strategy`` is a pipeline token: one of the four multiplex kernels
    or ``collapsed`` (merge the training layers, then walk uniformly).
    ``seed`` overrides the seed fields of both configs so one value
    controls the whole run. When ``artifact_dir`` is given, the corpus
    and embeddings are persisted there as corpus.txt / embeddings.txt.
    """
    token = strategy.value if isinstance(strategy, WalkStrategy) else str(strategy)
    if token not in PIPELINE_STRATEGIES and token != "uniform":
        raise ValidationError(f"unknown pipeline strategy {token!r}; expected one "
                              f"of {list(PIPELINE_STRATEGIES)}")
    walk_cfg = replace(walk_cfg or WalkConfig(), seed=seed)
    train_cfg = replace(train_cfg or TrainConfig(), seed=seed)
    if operators is None:
        operators = list(EdgeOperator)
    timings = {"load": load_seconds}

    t0 = time.perf_counter()
    train_graph, target_edges = split_target(g, target)
    if token == "collapsed":
        train_graph = collapse(train_graph)
        walk_strategy = WalkStrategy.SINGLE_LAYER_UNIFORM
    else:
        walk_strategy = WalkStrategy.from_token(token)
    st = strengths(train_graph)
    corpus = generate_corpus(train_graph, st, walk_strategy, walk_cfg)
    if artifact_dir is not None:
        corpus.save(os.path.join(artifact_dir, "corpus.txt"), strategy_token=token)
    timings["walk"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    token_walks = corpus.token_walks()
    vocab = build_vocab(token_walks)
    emb = train(token_walks, train_cfg, vocab)
    if artifact_dir is not None:
        save_embeddings(emb, vocab, os.path.join(artifact_dir, "embeddings.txt"))
    timings["embed"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    aurocs, excluded = evaluate_embeddings(g, target_edges, emb, vocab, operators,
                                           lam=lam, seed=seed, ratio=ratio,
                                           split_fraction=split_fraction)
    timings["eval"] = time.perf_counter() - t0

    config = {
        "target": target, "l": walk_cfg.walk_length, "n": walk_cfg.walks_per_node,
        "d": train_cfg.dim, "window": train_cfg.window, "epochs": train_cfg.epochs,
        "lr": train_cfg.learning_rate, "negatives": train_cfg.negative,
        "lambda": lam, "seed": seed, "threads": train_cfg.threads,
    }
    return EvalReport(dataset=dataset, strategy=token, aurocs=aurocs,
                      timings=timings, config=config, excluded_nodes=excluded)


# -- report serialization ---------------------------------------------------


def write_report_csv(reports, path_or_file):
    """Long-format CSV: operator rows carry AUROC, stage rows carry seconds."""
    if isinstance(reports, EvalReport):
        reports = [reports]
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "strategy", "operator", "auroc", "stage", "seconds"])
        for rep in reports:
            for op, score in rep.aurocs.items():
                writer.writerow([rep.dataset, rep.strategy, op, f"{score:.6f}", "", ""])
            for stage in STAGES:
                if stage in rep.timings:
                    writer.writerow([rep.dataset, rep.strategy, "", "",
                                     stage, f"{rep.timings[stage]:.6f}"])
    finally:
        if own:
            fh.close()


def format_report(report: EvalReport) -> str:
    """Human-readable summary table."""
    buf = io.StringIO()
    buf.write(f"dataset: {report.dataset or '(unnamed)'}   "
              f"strategy: {report.strategy}\n")
    if report.excluded_nodes:
        buf.write(f"nodes without embeddings excluded: {report.excluded_nodes}\n")
    buf.write("operator   auroc\n")
    for op, score in report.aurocs.items():
        buf.write(f"{op:<10} {score:.4f}\n")
    buf.write("stage      seconds\n")
    for stage in STAGES:
        if stage in report.timings:
            buf.write(f"{stage:<10} {report.timings[stage]:.3f}\n")
    return buf.getvalue()
