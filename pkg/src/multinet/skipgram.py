"""Skip-gram embedding training over walk corpora.

One d-dimensional vector is learned per node token by maximizing the
log-likelihood of each walk position's window neighbors given that
position, factorized over context nodes and modeled as a softmax of
input/output vector dot products.

The production trainer approximates the softmax with negative sampling
(noise distribution proportional to token frequency ** 0.75) and runs a
compiled per-pair SGD loop. An exact-softmax objective and a full-batch
exact trainer are kept for small instances; they serve as independent
checks on the scalable path, not as a training route.

Embedding files use the word2vec text layout: a "<count> <dim>" header
line, then one "token v1 .. vd" line per token.
"""

from __future__ import annotations

import hashlib
import struct
import threading
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import EmbeddingFormatError, TrainingError, ValidationError

__all__ = [
    "Vocabulary",
    "TrainConfig",
    "EmbeddingMatrix",
    "build_vocab",
    "context_pairs",
    "softmax_prob",
    "log_likelihood",
    "train",
    "train_exact_softmax",
    "negative_sampling_objective",
    "negative_sampling_gradients",
    "save_embeddings",
    "load_embeddings",
]

# Exact-softmax helpers refuse above this vocabulary size; they exist to
# cross-check small instances, not to train at scale.
EXACT_SOFTMAX_LIMIT = 10_000


class Vocabulary:
    """Token <-> dense index map with corpus frequencies.

    Index order is first appearance in the corpus, which keeps every
    derived artifact (noise table, embedding file row order) stable for
    a fixed corpus.
    """

    def __init__(self, tokens, counts):
        self.tokens = list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        self.counts = np.asarray(counts, dtype=np.int64)
        if len(self.index) != len(self.tokens):
            raise ValidationError("duplicate tokens in vocabulary")
        if self.counts.shape != (len(self.tokens),) or (self.counts <= 0).any():
            raise ValidationError("vocabulary frequencies must be positive")

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def __getitem__(self, token):
        return self.index[token]


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 150
    window: int = 10
    epochs: int = 5
    learning_rate: float = 0.025
    negative: int = 5
    noise_exponent: float = 0.75
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.epochs < 1 or self.negative < 1:
            raise ValidationError("dim, window, epochs, and negative must be >= 1")
        if self.learning_rate <= 0 or self.noise_exponent <= 0:
            raise ValidationError("learning_rate and noise_exponent must be > 0")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")


@dataclass
class EmbeddingMatrix:
    """Learned parameters: input vectors are the published embedding."""

    input_vectors: np.ndarray
    output_vectors: np.ndarray

    @property
    def dim(self):
        return self.input_vectors.shape[1]

    @property
    def vocab_size(self):
        return self.input_vectors.shape[0]


def build_vocab(walks) -> Vocabulary:
    """Count token occurrences over all walks (first-appearance order)."""
    counts = {}
    for walk in walks:
        for token in walk:
            counts[token] = counts.get(token, 0) + 1
    if not counts:
        raise ValidationError("corpus is empty")
    return Vocabulary(list(counts.keys()), list(counts.values()))


def context_pairs(walk, window: int):
    """(center, context) pairs within ``window`` positions, boundary-clipped."""
    if window < 1:
        raise ValidationError("window must be >= 1")
    pairs = []
    n = len(walk)
    for t in range(n):
        lo = max(0, t - window)
        hi = min(n, t + window + 1)
        for s in range(lo, hi):
            if s != t:
                pairs.append((walk[t], walk[s]))
    return pairs


def _pair_arrays(walks, vocab: Vocabulary, window: int):
    centers, contexts = [], []
    index = vocab.index
    for walk in walks:
        for c, x in context_pairs(walk, window):
            centers.append(index[c])
            contexts.append(index[x])
    return (np.asarray(centers, dtype=np.int32),
            np.asarray(contexts, dtype=np.int32))


# -- exact softmax (small-instance oracle path) --------------------------


def softmax_prob(emb: EmbeddingMatrix, v: int, u: int) -> float:
    """P(v | u) under the full softmax (output dot input), overflow-safe."""
    logits = emb.output_vectors @ emb.input_vectors[u]
    logits -= logits.max()
    e = np.exp(logits)
    return float(e[v] / e.sum())


def log_likelihood(emb: EmbeddingMatrix, walks, window: int,
                   vocab: Vocabulary) -> float:
    """Exact corpus log-likelihood: sum of log P(context | center).

    Refuses above EXACT_SOFTMAX_LIMIT tokens; the full softmax is
    quadratic in the vocabulary and meant for verification only.
    """
    if len(vocab) > EXACT_SOFTMAX_LIMIT:
        raise ValidationError(
            f"exact softmax refused for |vocab|={len(vocab)} > "
            f"{EXACT_SOFTMAX_LIMIT}; it is a small-instance oracle")
    centers, contexts = _pair_arrays(walks, vocab, window)
    if centers.size == 0:
        return 0.0
    inp, out = emb.input_vectors, emb.output_vectors
    total = 0.0
    for u in np.unique(centers):
        mask = centers == u
        logits = out @ inp[u]
        m = logits.max()
        lse = m + np.log(np.exp(logits - m).sum())
        total += float(logits[contexts[mask]].sum() - mask.sum() * lse)
    return total


def train_exact_softmax(walks, dim: int, window: int, epochs: int,
                        learning_rate: float, seed: int,
                        vocab: Vocabulary | None = None) -> EmbeddingMatrix:
    """Full-batch gradient ascent on the exact softmax objective.

    Small-instance verification trainer; one gradient step per epoch at
    a fixed learning rate.
    """
    if vocab is None:
        vocab = build_vocab(walks)
    n = len(vocab)
    if n > EXACT_SOFTMAX_LIMIT:
        raise ValidationError("exact-softmax training is a small-instance oracle")
    if dim >= n:
        raise ValidationError(f"dim={dim} must be < vocab size {n}")
    centers, contexts = _pair_arrays(walks, vocab, window)
    counts = np.zeros((n, n))
    np.add.at(counts, (centers, contexts), 1.0)
    row_totals = counts.sum(axis=1)

    emb = _init_embeddings(n, dim, seed)
    inp, out = emb.input_vectors, emb.output_vectors
    for _ in range(epochs):
        logits = inp @ out.T
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        p /= p.sum(axis=1, keepdims=True)
        resid = counts - row_totals[:, None] * p
        grad_inp = resid @ out
        grad_out = resid.T @ inp
        inp += learning_rate * grad_inp
        out += learning_rate * grad_out
    return emb


# -- negative sampling (production path) ----------------------------------


def negative_sampling_objective(u_vec, v_vec, neg_vecs) -> float:
    """Per-pair objective: log s(v.u) + sum_w log s(-w.u)."""
    def log_sigmoid(x):
        return -np.logaddexp(0.0, -x)

    value = log_sigmoid(float(v_vec @ u_vec))
    for w_vec in np.atleast_2d(neg_vecs):
        value += log_sigmoid(-float(w_vec @ u_vec))
    return float(value)


def negative_sampling_gradients(u_vec, v_vec, neg_vecs):
    """Analytic gradients of the per-pair objective.

    Returns (grad_u, grad_v, grad_negs) with grad_negs row-aligned to
    ``neg_vecs``.
    """
    neg_vecs = np.atleast_2d(neg_vecs)
    sig_pos = 1.0 / (1.0 + np.exp(-float(v_vec @ u_vec)))
    grad_v = (1.0 - sig_pos) * u_vec
    grad_u = (1.0 - sig_pos) * v_vec
    grad_negs = np.empty_like(neg_vecs)
    for r, w_vec in enumerate(neg_vecs):
        sig = 1.0 / (1.0 + np.exp(-float(w_vec @ u_vec)))
        grad_negs[r] = -sig * u_vec
        grad_u = grad_u - sig * w_vec
    return grad_u, grad_v, grad_negs


@njit(cache=True, nogil=True)
def _sgd_shard(inp, out, centers, contexts, noise_cum, epochs, lr0, lr_min,
               negative, seed):
    """Per-pair negative-sampling SGD over one shard of pairs.

    Uses an inline splitmix64 stream for the noise draws so runs are
    reproducible independent of any library RNG state.
    """
    d = inp.shape[1]
    n_pairs = centers.shape[0]
    total = float(epochs) * n_pairs
    state = seed  # uint64; callers must pass np.uint64
    gu = np.empty(d)
    t = 0.0
    for _ep in range(epochs):
        for p in range(n_pairs):
            lr = lr0 * (1.0 - t / total)
            if lr < lr_min:
                lr = lr_min
            u = centers[p]
            for k in range(d):
                gu[k] = 0.0
            for s in range(negative + 1):
                if s == 0:
                    w = np.int64(contexts[p])
                    label = 1.0
                else:
                    state = state + np.uint64(0x9E3779B97F4A7C15)
                    z = state
                    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
                    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
                    z = z ^ (z >> np.uint64(31))
                    r = (z >> np.uint64(11)) * 2.0 ** -53
                    lo = np.int64(0)
                    hi = np.int64(noise_cum.shape[0])
                    while lo < hi:
                        mid = (lo + hi) // 2
                        if noise_cum[mid] <= r:
                            lo = mid + 1
                        else:
                            hi = mid
                    w = lo
                    if w >= noise_cum.shape[0]:
                        w = np.int64(noise_cum.shape[0] - 1)
                    label = 0.0
                x = 0.0
                for k in range(d):
                    x += out[w, k] * inp[u, k]
                sig = 1.0 / (1.0 + np.exp(-x))
                g = lr * (label - sig)
                for k in range(d):
                    gu[k] += g * out[w, k]
                    out[w, k] += g * inp[u, k]
            for k in range(d):
                inp[u, k] += gu[k]
            t += 1.0


def _init_embeddings(vocab_size: int, dim: int, seed: int) -> EmbeddingMatrix:
    rng = np.random.default_rng(_derive_seed(seed, "init"))
    inp = (rng.random((vocab_size, dim)) - 0.5) / dim
    out = np.zeros((vocab_size, dim))
    return EmbeddingMatrix(input_vectors=inp, output_vectors=out)


def _derive_seed(seed: int, tag: str, extra: int = 0) -> int:
    payload = struct.pack("<Qq", seed & 0xFFFFFFFFFFFFFFFF, extra) + tag.encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def _noise_cumulative(counts, exponent: float):
    weights = counts.astype(np.float64) ** exponent
    cum = np.cumsum(weights / weights.sum())
    cum[-1] = 1.0
    return cum


def train(walks, cfg: TrainConfig, vocab: Vocabulary | None = None) -> EmbeddingMatrix:
    """Train embeddings with negative-sampling SGD.

    With ``cfg.threads == 1`` the result is deterministic for a fixed
    (corpus order, seed). With more threads the pair stream is sharded
    and workers update the shared matrices without locks; lost updates
    are tolerated and results are NOT deterministic.
    """
    if vocab is None:
        vocab = build_vocab(walks)
    n = len(vocab)
    if n < 2:
        raise ValidationError("need at least 2 distinct tokens to train")
    if cfg.dim >= n:
        raise ValidationError(f"dim={cfg.dim} must be < vocab size {n}")
    centers, contexts = _pair_arrays(walks, vocab, cfg.window)
    if centers.size == 0:
        raise ValidationError("corpus yields no context pairs")
    noise_cum = _noise_cumulative(vocab.counts, cfg.noise_exponent)
    emb = _init_embeddings(n, cfg.dim, cfg.seed)
    lr_min = cfg.learning_rate / 100.0

    if cfg.threads == 1:
        _sgd_shard(emb.input_vectors, emb.output_vectors, centers, contexts,
                   noise_cum, cfg.epochs, cfg.learning_rate, lr_min,
                   cfg.negative, np.uint64(_derive_seed(cfg.seed, "sgd")))
    else:
        bounds = np.linspace(0, centers.size, cfg.threads + 1).astype(np.int64)
        workers = []
        for s in range(cfg.threads):
            lo, hi = int(bounds[s]), int(bounds[s + 1])
            if lo == hi:
                continue
            workers.append(threading.Thread(target=_sgd_shard, args=(
                emb.input_vectors, emb.output_vectors,
                centers[lo:hi], contexts[lo:hi], noise_cum, cfg.epochs,
                cfg.learning_rate, lr_min, cfg.negative,
                np.uint64(_derive_seed(cfg.seed, "sgd", s)))))
        for w in workers:
            w.start()
        for w in workers:
            w.join()

    if not (np.isfinite(emb.input_vectors).all()
            and np.isfinite(emb.output_vectors).all()):
        raise TrainingError(
            "training produced non-finite parameters; lower the learning rate")
    return emb


# -- embedding file I/O ----------------------------------------------------


def save_embeddings(emb: EmbeddingMatrix, vocab: Vocabulary, path):
    """Write input vectors in word2vec text format."""
    if len(vocab) != emb.vocab_size:
        raise ValidationError("vocabulary and embedding sizes disagree")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{emb.vocab_size} {emb.dim}\n")
        for i, token in enumerate(vocab.tokens):
            row = " ".join(f"{x:.8g}" for x in emb.input_vectors[i])
            fh.write(f"{token} {row}\n")


def load_embeddings(path):
    """Read a word2vec text file; returns (EmbeddingMatrix, Vocabulary).

    Output vectors are not serialized and come back as zeros; loaded
    vocabularies carry unit frequencies.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingFormatError("line 1: expected '<count> <dim>' header")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingFormatError("line 1: header fields must be integers") from None
        tokens = []
        vectors = np.empty((count, dim))
        for i in range(count):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise EmbeddingFormatError(
                    f"line {i + 2}: expected {dim + 1} columns, got {len(parts)}")
            tokens.append(parts[0])
            try:
                vectors[i] = [float(x) for x in parts[1:]]
            except ValueError:
                raise EmbeddingFormatError(f"line {i + 2}: non-numeric vector entry") from None
    vocab = Vocabulary(tokens, np.ones(count, dtype=np.int64))
    emb = EmbeddingMatrix(input_vectors=vectors, output_vectors=np.zeros((count, dim)))
    return emb, vocab
