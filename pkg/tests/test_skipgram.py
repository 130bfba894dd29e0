import math

import numpy as np
import pytest

from multinet import (EmbeddingFormatError, EmbeddingMatrix, MultiplexGraph,
                      TrainingError, TrainConfig, ValidationError, WalkConfig,
                      WalkStrategy, build_vocab, context_pairs, generate_corpus,
                      load_embeddings, log_likelihood, save_embeddings,
                      softmax_prob, strengths, train, train_exact_softmax)
from multinet.skipgram import (Vocabulary, _derive_seed, _init_embeddings,
                               _noise_cumulative, _pair_arrays,
                               negative_sampling_gradients,
                               negative_sampling_objective)


def toy_corpus():
    return [["a", "b", "c", "a"], ["b", "d", "a"], ["c", "d", "b", "d"]]


class TestVocabulary:
    def test_counts(self):
        vocab = build_vocab([["a", "b"], ["b", "c"]])
        assert {t: int(vocab.counts[vocab[t]]) for t in vocab.tokens} == \
            {"a": 1, "b": 2, "c": 1}

    def test_repeated_token(self):
        vocab = build_vocab([["a", "a", "a"]])
        assert len(vocab) == 1
        assert vocab.counts[0] == 3

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValidationError):
            build_vocab([])

    def test_bijection(self):
        vocab = build_vocab(toy_corpus())
        assert sorted(vocab.index.values()) == list(range(len(vocab)))


class TestContextPairs:
    def test_window_one(self):
        assert context_pairs(["a", "b", "c"], 1) == \
            [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")]

    def test_single_token(self):
        assert context_pairs(["a"], 5) == []

    def test_full_window_covers_all_ordered_pairs(self):
        walk = [f"t{i}" for i in range(11)]
        pairs = context_pairs(walk, 10)
        assert len(pairs) == 110  # 11 * 10 ordered position pairs
        assert len(set(pairs)) == 110

    def test_clipping_at_boundaries(self):
        pairs = context_pairs(["a", "b", "c", "d"], 2)
        assert ("a", "c") in pairs and ("a", "d") not in pairs


class TestSoftmax:
    def test_zero_vectors_are_uniform(self):
        emb = EmbeddingMatrix(np.zeros((4, 2)), np.zeros((4, 2)))
        for v in range(4):
            assert softmax_prob(emb, v, 0) == pytest.approx(0.25)

    def test_single_token_prob_one(self):
        emb = EmbeddingMatrix(np.zeros((1, 1)), np.zeros((1, 1)))
        assert softmax_prob(emb, 0, 0) == 1.0

    def test_normalization(self, rng):
        emb = EmbeddingMatrix(rng.normal(size=(3, 4)), rng.normal(size=(3, 4)))
        for u in range(3):
            total = sum(softmax_prob(emb, v, u) for v in range(3))
            assert abs(total - 1.0) < 1e-12

    def test_overflow_safety(self):
        emb = EmbeddingMatrix(np.full((2, 3), 200.0), np.full((2, 3), 200.0))
        p = softmax_prob(emb, 0, 1)
        assert math.isfinite(p) and 0.0 <= p <= 1.0


class TestLogLikelihood:
    def test_uniform_case(self):
        walks = toy_corpus()
        vocab = build_vocab(walks)
        emb = EmbeddingMatrix(np.zeros((len(vocab), 2)), np.zeros((len(vocab), 2)))
        n_pairs = sum(len(context_pairs(w, 2)) for w in walks)
        want = n_pairs * math.log(1 / len(vocab))
        assert log_likelihood(emb, walks, 2, vocab) == pytest.approx(want)

    def test_empty_corpus_is_zero(self):
        vocab = build_vocab(toy_corpus())
        emb = EmbeddingMatrix(np.zeros((len(vocab), 2)), np.zeros((len(vocab), 2)))
        assert log_likelihood(emb, [], 2, vocab) == 0.0

    def test_size_guard(self):
        n = 10_001
        vocab = Vocabulary([f"t{i}" for i in range(n)], np.ones(n, dtype=np.int64))
        emb = EmbeddingMatrix(np.zeros((n, 2)), np.zeros((n, 2)))
        with pytest.raises(ValidationError, match="oracle"):
            log_likelihood(emb, [["t0", "t1"]], 1, vocab)

    def test_one_sgd_epoch_improves_objective(self):
        walks = [["a", "b", "c", "d"], ["b", "a", "d", "c"],
                 ["c", "d", "a", "b"], ["d", "c", "b", "a"]]
        vocab = build_vocab(walks)
        cfg = TrainConfig(dim=2, window=2, epochs=1, seed=11)
        before = log_likelihood(_init_embeddings(len(vocab), 2, cfg.seed),
                                walks, 2, vocab)
        after = log_likelihood(train(walks, cfg, vocab), walks, 2, vocab)
        assert after >= before


class TestExactSoftmaxTrainer:
    def test_objective_non_decreasing_over_epochs(self):
        walks = toy_corpus()
        vocab = build_vocab(walks)
        values = []
        for epochs in range(1, 6):
            emb = train_exact_softmax(walks, dim=2, window=2, epochs=epochs,
                                      learning_rate=0.02, seed=5, vocab=vocab)
            values.append(log_likelihood(emb, walks, 2, vocab))
        init = log_likelihood(_init_embeddings(len(vocab), 2, 5), walks, 2, vocab)
        assert values[0] >= init
        for a, b in zip(values, values[1:]):
            assert b >= a - 1e-9


class TestGradients:
    def test_matches_central_differences(self, rng):
        h = 1e-5
        for _ in range(20):
            d, m = 6, 3
            u = rng.normal(scale=0.5, size=d)
            v = rng.normal(scale=0.5, size=d)
            negs = rng.normal(scale=0.5, size=(m, d))
            gu, gv, gn = negative_sampling_gradients(u, v, negs)

            def check(analytic, bump):
                for k in range(analytic.size):
                    plus = negative_sampling_objective(*bump(k, +h))
                    minus = negative_sampling_objective(*bump(k, -h))
                    numeric = (plus - minus) / (2 * h)
                    a = analytic.flat[k]
                    assert abs(a - numeric) <= 1e-4 * max(1.0, abs(a), abs(numeric))

            def bump_u(k, eps):
                u2 = u.copy(); u2[k] += eps
                return u2, v, negs

            def bump_v(k, eps):
                v2 = v.copy(); v2[k] += eps
                return u, v2, negs

            check(gu, bump_u)
            check(gv, bump_v)
            for r in range(m):
                def bump_n(k, eps, r=r):
                    n2 = negs.copy(); n2[r, k % d] += eps
                    return u, v, n2
                check(gn[r], lambda k, eps, r=r: bump_n(k, eps, r))


def _reference_sgd(inp, out, centers, contexts, noise_cum, epochs, lr0, lr_min,
                   negative, seed):
    """Pure-python mirror of the update rule, written independently."""
    mask = (1 << 64) - 1
    state = seed & mask
    d = inp.shape[1]
    total = epochs * len(centers)
    t = 0
    for _ep in range(epochs):
        for p in range(len(centers)):
            lr = max(lr0 * (1.0 - t / total), lr_min)
            u = centers[p]
            gu = [0.0] * d
            for s in range(negative + 1):
                if s == 0:
                    w, label = contexts[p], 1.0
                else:
                    state = (state + 0x9E3779B97F4A7C15) & mask
                    z = state
                    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
                    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
                    z = z ^ (z >> 31)
                    r = (z >> 11) * 2.0 ** -53
                    lo, hi = 0, len(noise_cum)
                    while lo < hi:
                        mid = (lo + hi) // 2
                        if noise_cum[mid] <= r:
                            lo = mid + 1
                        else:
                            hi = mid
                    w, label = min(lo, len(noise_cum) - 1), 0.0
                x = 0.0
                for k in range(d):
                    x += out[w, k] * inp[u, k]
                sig = 1.0 / (1.0 + math.exp(-x))
                g = lr * (label - sig)
                for k in range(d):
                    gu[k] += g * out[w, k]
                    out[w, k] += g * inp[u, k]
            for k in range(d):
                inp[u, k] += gu[k]
            t += 1


class TestTrainer:
    def test_matches_pure_python_reference(self):
        walks = toy_corpus()
        vocab = build_vocab(walks)
        cfg = TrainConfig(dim=3, window=2, epochs=2, negative=2, seed=21)
        emb = train(walks, cfg, vocab)

        ref = _init_embeddings(len(vocab), cfg.dim, cfg.seed)
        centers, contexts = _pair_arrays(walks, vocab, cfg.window)
        noise_cum = _noise_cumulative(vocab.counts, cfg.noise_exponent)
        _reference_sgd(ref.input_vectors, ref.output_vectors, centers, contexts,
                       noise_cum, cfg.epochs, cfg.learning_rate,
                       cfg.learning_rate / 100, cfg.negative,
                       _derive_seed(cfg.seed, "sgd"))
        np.testing.assert_allclose(emb.input_vectors, ref.input_vectors, atol=1e-12)
        np.testing.assert_allclose(emb.output_vectors, ref.output_vectors, atol=1e-12)

    def test_deterministic_under_fixed_seed(self):
        walks = toy_corpus()
        cfg = TrainConfig(dim=2, window=2, epochs=3, seed=9)
        one = train(walks, cfg)
        two = train(walks, cfg)
        assert np.array_equal(one.input_vectors, two.input_vectors)
        assert np.array_equal(one.output_vectors, two.output_vectors)

    def test_two_cliques_separate(self):
        edges = []
        for group, names in enumerate((["a%d" % i for i in range(10)],
                                       ["b%d" % i for i in range(10)])):
            for i in range(10):
                for j in range(i + 1, 10):
                    edges.append((0, names[i], names[j], 1.0))
        g = MultiplexGraph(edges, num_layers=1)
        corpus = generate_corpus(g, strengths(g), WalkStrategy.SINGLE_LAYER_UNIFORM,
                                 WalkConfig(walk_length=10, walks_per_node=5, seed=2))
        walks = corpus.token_walks()
        vocab = build_vocab(walks)
        emb = train(walks, TrainConfig(dim=8, window=5, epochs=5, seed=2), vocab)

        vecs = emb.input_vectors / np.linalg.norm(emb.input_vectors, axis=1,
                                                  keepdims=True)
        groups = np.asarray([tok.startswith("a") for tok in vocab.tokens])
        sims = vecs @ vecs.T
        same = sims[np.ix_(groups, groups)]
        cross = sims[np.ix_(groups, ~groups)]
        intra = (same.sum() - np.trace(same)) / (same.size - groups.sum())
        assert intra > cross.mean()

    def test_dim_must_be_below_vocab(self):
        with pytest.raises(ValidationError, match="vocab"):
            train(toy_corpus(), TrainConfig(dim=4, window=2))

    def test_single_token_vocab_rejected(self):
        with pytest.raises(ValidationError):
            train([["a", "a"]], TrainConfig(dim=1, window=1))

    def test_divergence_aborts(self):
        with pytest.raises(TrainingError):
            train(toy_corpus(), TrainConfig(dim=2, window=2, epochs=50,
                                            learning_rate=1e150, seed=0))

    def test_hogwild_smoke(self):
        walks = toy_corpus() * 10
        emb = train(walks, TrainConfig(dim=2, window=2, epochs=2, seed=3,
                                       threads=2))
        assert emb.input_vectors.shape == (4, 2)
        assert np.isfinite(emb.input_vectors).all()


class TestEmbeddingIO:
    def test_round_trip(self, tmp_path, rng):
        vocab = build_vocab(toy_corpus())
        emb = EmbeddingMatrix(rng.normal(size=(len(vocab), 5)),
                              np.zeros((len(vocab), 5)))
        path = tmp_path / "emb.txt"
        save_embeddings(emb, vocab, path)
        loaded, vocab2 = load_embeddings(path)
        assert vocab2.tokens == vocab.tokens
        np.testing.assert_allclose(loaded.input_vectors, emb.input_vectors,
                                   atol=1e-5)

    def test_header_line(self, tmp_path):
        vocab = build_vocab(toy_corpus())
        emb = EmbeddingMatrix(np.zeros((len(vocab), 3)), np.zeros((len(vocab), 3)))
        path = tmp_path / "emb.txt"
        save_embeddings(emb, vocab, path)
        assert path.read_text(encoding="utf-8").splitlines()[0] == \
            f"{len(vocab)} 3"

    def test_wrong_column_count_names_row(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("2 3\na 0.0 0.0 0.0\nb 0.0 0.0\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="line 3"):
            load_embeddings(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("oops\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="line 1"):
            load_embeddings(path)
