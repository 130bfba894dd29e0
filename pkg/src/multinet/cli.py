"""Command-line interface: walk, embed, eval, and pipeline subcommands.

Settings resolve with precedence: CLI flag > config file (flat
``key=value`` lines, same names as the flags) > built-in default.
The ``MULTINET_THREADS`` environment variable is the fallback for
``--threads``. Exit codes: 1 usage, 2 validation, 3 I/O.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, fields

from .edgeops import EdgeOperator
from .errors import ValidationError
from .mgraph import collapse, load_multiplex, strengths
from .reconstruct import (EvalReport, evaluate_embeddings, format_report,
                          run_reconstruction, split_target, write_report_csv)
from .skipgram import TrainConfig, build_vocab, load_embeddings, save_embeddings, train
from .walkers import WalkConfig, WalkStrategy, generate_corpus, load_corpus

EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


@dataclass
class RunConfig:
    """Resolved settings for one command invocation."""

    graph: str | None = None
    corpus: str | None = None
    embeddings: str | None = None
    directed: bool = False
    weighted: bool = False
    strategy: str = "multinet"
    l: int = 10
    n: int = 5
    d: int = 150
    window: int = 10
    epochs: int = 5
    lr: float = 0.025
    negatives: int = 5
    target: int | None = None
    operators: str = "hadamard,average,l1,l2"
    lam: float = 1.0
    seed: int = 0
    out: str | None = None
    outdir: str = "."
    deterministic: bool = False
    threads: int | None = None


# config-file key -> (dataclass field, parser)
def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"expected a boolean, got {text!r}")


_CONFIG_KEYS = {
    "graph": ("graph", str),
    "corpus": ("corpus", str),
    "embeddings": ("embeddings", str),
    "directed": ("directed", _parse_bool),
    "weighted": ("weighted", _parse_bool),
    "strategy": ("strategy", str),
    "l": ("l", int),
    "n": ("n", int),
    "d": ("d", int),
    "window": ("window", int),
    "epochs": ("epochs", int),
    "lr": ("lr", float),
    "negatives": ("negatives", int),
    "target": ("target", int),
    "operators": ("operators", str),
    "lambda": ("lam", float),
    "seed": ("seed", int),
    "out": ("out", str),
    "outdir": ("outdir", str),
    "deterministic": ("deterministic", _parse_bool),
    "threads": ("threads", int),
}


def _read_config_file(path) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{line_no}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValidationError(f"{path}:{line_no}: unknown key {key!r}")
            field_name, parse = _CONFIG_KEYS[key]
            try:
                values[field_name] = parse(value.strip())
            except ValueError:
                raise ValidationError(
                    f"{path}:{line_no}: bad value {value.strip()!r} for {key}") from None
    return values


def _resolve(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for name, value in _read_config_file(args.config).items():
            setattr(cfg, name, value)
    for f in fields(RunConfig):
        cli_value = getattr(args, f.name, None)
        if cli_value is not None:
            setattr(cfg, f.name, cli_value)
    if cfg.threads is None:
        cfg.threads = int(os.environ.get("MULTINET_THREADS", "1"))
    if cfg.deterministic:
        cfg.threads = 1
    if cfg.threads < 1:
        raise ValidationError("threads must be >= 1")
    return cfg


def _operators(cfg: RunConfig):
    return [EdgeOperator.from_token(tok.strip())
            for tok in cfg.operators.split(",") if tok.strip()]


def _walk_config(cfg: RunConfig) -> WalkConfig:
    return WalkConfig(walk_length=cfg.l, walks_per_node=cfg.n, seed=cfg.seed)


def _train_config(cfg: RunConfig) -> TrainConfig:
    return TrainConfig(dim=cfg.d, window=cfg.window, epochs=cfg.epochs,
                       learning_rate=cfg.lr, negative=cfg.negatives,
                       seed=cfg.seed, threads=cfg.threads)


def _load_graph(cfg: RunConfig):
    if not cfg.graph:
        raise ValidationError("a graph file is required (--graph)")
    return load_multiplex(cfg.graph, directed=cfg.directed, weighted=cfg.weighted)


def _prepare_walk_graph(g, token: str):
    """Apply the strategy token to a loaded graph for walking."""
    if token == "collapsed":
        return collapse(g), WalkStrategy.SINGLE_LAYER_UNIFORM
    return g, WalkStrategy.from_token(token)


def cmd_walk(args) -> int:
    cfg = _resolve(args)
    g = _load_graph(cfg)
    walk_graph, strategy = _prepare_walk_graph(g, cfg.strategy)
    corpus = generate_corpus(walk_graph, strengths(walk_graph), strategy,
                             _walk_config(cfg))
    out = cfg.out or "corpus.txt"
    corpus.save(out, strategy_token=cfg.strategy)
    print(f"wrote {len(corpus)} walks to {out}")
    return 0


def cmd_embed(args) -> int:
    cfg = _resolve(args)
    if not cfg.corpus:
        raise ValidationError("a corpus file is required (--corpus)")
    walks, _meta = load_corpus(cfg.corpus)
    vocab = build_vocab(walks)
    emb = train(walks, _train_config(cfg), vocab)
    out = cfg.out or "embeddings.txt"
    save_embeddings(emb, vocab, out)
    print(f"wrote {len(vocab)} x {emb.dim} embeddings to {out}")
    return 0


def cmd_eval(args) -> int:
    cfg = _resolve(args)
    if cfg.target is None:
        raise ValidationError("a target layer is required (--target)")
    if not cfg.embeddings:
        raise ValidationError("an embeddings file is required (--embeddings)")
    t0 = time.perf_counter()
    g = _load_graph(cfg)
    _train_graph, target_edges = split_target(g, cfg.target)
    emb, vocab = load_embeddings(cfg.embeddings)
    load_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    aurocs, excluded = evaluate_embeddings(g, target_edges, emb, vocab,
                                           _operators(cfg), lam=cfg.lam,
                                           seed=cfg.seed)
    report = EvalReport(dataset=_dataset_name(cfg), strategy="precomputed",
                        aurocs=aurocs,
                        timings={"load": load_seconds,
                                 "eval": time.perf_counter() - t0},
                        config={"target": cfg.target, "lambda": cfg.lam,
                                "seed": cfg.seed},
                        excluded_nodes=excluded)
    out = cfg.out or "report.csv"
    write_report_csv(report, out)
    print(format_report(report), end="")
    print(f"wrote {out}")
    return 0


def cmd_pipeline(args) -> int:
    cfg = _resolve(args)
    if cfg.target is None:
        raise ValidationError("a target layer is required (--target)")
    os.makedirs(cfg.outdir, exist_ok=True)
    t0 = time.perf_counter()
    g = _load_graph(cfg)
    load_seconds = time.perf_counter() - t0
    report = run_reconstruction(
        g, cfg.target, cfg.strategy, walk_cfg=_walk_config(cfg),
        train_cfg=_train_config(cfg), operators=_operators(cfg), lam=cfg.lam,
        seed=cfg.seed, dataset=_dataset_name(cfg), artifact_dir=cfg.outdir,
        load_seconds=load_seconds)
    out = os.path.join(cfg.outdir, "report.csv")
    write_report_csv(report, out)
    print(format_report(report), end="")
    print(f"wrote {out}")
    return 0


def _dataset_name(cfg: RunConfig) -> str:
    return os.path.splitext(os.path.basename(cfg.graph or ""))[0]


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--threads", type=int,
                   help="worker threads for training; falls back to "
                        "MULTINET_THREADS, then 1")
    p.add_argument("--deterministic", action="store_const", const=True,
                   help="force single-threaded, byte-reproducible runs")


def _add_graph(p):
    p.add_argument("--graph", help="multiplex edge-list file")
    p.add_argument("--directed", action="store_const", const=True,
                   help="treat edges as directed (default undirected)")
    p.add_argument("--weighted", action="store_const", const=True,
                   help="read the 4th column as edge weight (default unweighted)")


def _add_walk(p):
    p.add_argument("--strategy",
                   help="classical | diffusive | physical | multinet | collapsed "
                        "(default multinet)")
    p.add_argument("--l", type=int, help="walk length (default 10)")
    p.add_argument("--n", type=int, help="walks per node per layer (default 5)")


def _add_embed(p):
    p.add_argument("--d", type=int, help="embedding dimension (default 150)")
    p.add_argument("--window", type=int, help="context window (default 10)")
    p.add_argument("--epochs", type=int, help="training epochs (default 5)")
    p.add_argument("--lr", type=float, help="initial learning rate (default 0.025)")
    p.add_argument("--negatives", type=int,
                   help="negative samples per pair (default 5)")


def _add_eval(p):
    p.add_argument("--target", type=int, help="layer to hold out and reconstruct")
    p.add_argument("--operators",
                   help="comma list of hadamard,average,l1,l2 (default all)")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="L2 regularization strength (default 1.0)")


def build_parser() -> _Parser:
    parser = _Parser(prog="multinet",
                     description="Multiplex network embeddings via layer-aware "
                                 "random walks, with held-out-layer "
                                 "reconstruction benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", parents=[], help="generate a walk corpus")
    _add_graph(p)
    _add_walk(p)
    _add_common(p)
    p.add_argument("--out", help="corpus output path (default corpus.txt)")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("embed", help="train embeddings from a corpus file")
    p.add_argument("--corpus", help="corpus file from the walk command")
    _add_embed(p)
    _add_common(p)
    p.add_argument("--out", help="embeddings output path (default embeddings.txt)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("eval", help="score precomputed embeddings on a target layer")
    _add_graph(p)
    p.add_argument("--embeddings", help="word2vec text embeddings file")
    _add_eval(p)
    _add_common(p)
    p.add_argument("--out", help="report CSV path (default report.csv)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", help="walk + embed + eval in one run")
    _add_graph(p)
    _add_walk(p)
    _add_embed(p)
    _add_eval(p)
    _add_common(p)
    p.add_argument("--outdir", help="directory for corpus/embeddings/report "
                                    "(default .)")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"multinet: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"multinet: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
