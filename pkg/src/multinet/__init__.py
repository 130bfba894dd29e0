"""Multiplex network embeddings from layer-aware random walks."""

from .edgeops import EdgeOperator, edge_feature, edge_features
from .errors import (DeadEnd, EmbeddingFormatError, InvalidStartError,
                     MultinetError, ParseError, TrainingError, ValidationError)
from .mgraph import (MultiplexGraph, StrengthTable, collapse, load_multiplex,
                     save_multiplex, strengths)
from .reconstruct import (EvalReport, ExampleSet, LogRegModel, auroc,
                          evaluate_embeddings, featurize, format_report,
                          run_reconstruction, sample_examples, split_target,
                          train_logreg, write_report_csv)
from .skipgram import (EmbeddingMatrix, TrainConfig, Vocabulary, build_vocab,
                       context_pairs, load_embeddings, log_likelihood,
                       save_embeddings, softmax_prob, train,
                       train_exact_softmax)
from .walkers import (TransitionSampler, WalkConfig, WalkCorpus, WalkState,
                      WalkStrategy, generate_corpus, load_corpus, multiwalk,
                      transition_row)

__version__ = "0.1.0"
