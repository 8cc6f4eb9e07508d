"""Greedy transition parsing and max-margin training over sentence encodings."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import transition as T
from .autograd import Node, add_n, affine, affine_tanh, backward, concat, pick, sub
from .data import ConlluSentence, Token, build_label_vocabulary, build_vocabularies, evaluate, is_projective
from .encoder import SentenceEncoder, UnitConfig
from .nn import ParameterStore, clip_gradients, make_optimizer
from .vocab import Vocabulary


class NonProjectiveError(ValueError):
    """Training was handed a non-projective tree; filter first."""


@dataclass
class TrainSettings:
    """Hyperparameters of a training run."""

    epochs: int = 30
    seed: int = 42
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    hidden_dim: int = 100
    margin: float = 1.0
    oracle: str = "dynamic"  # or "static"
    exploration: float = 0.1
    explore_from_epoch: int = 2
    clip_norm: float = 5.0
    float32: bool = False


class TransitionScorer:
    """One-hidden-layer feedforward from four context vectors to scores.

    Features are the top three stack items and the first buffer item; a
    learned placeholder vector stands in for absent positions. Output is
    one score per labeled transition: index 0 is shift, then left-arc per
    label, then right-arc per label.
    """

    def __init__(self, store: ParameterStore, dim_encoder: int, n_labels: int,
                 hidden_dim: int = 100):
        self.dim_encoder = dim_encoder
        self.n_labels = n_labels
        self.n_outputs = 1 + 2 * n_labels
        self.placeholder = store.vector("scorer/placeholder", dim_encoder)
        self.hidden_weight = store.matrix("scorer/W1", hidden_dim, 4 * dim_encoder)
        self.hidden_bias = store.vector("scorer/b1", hidden_dim)
        self.out_weight = store.matrix("scorer/W2", self.n_outputs, hidden_dim)
        self.out_bias = store.vector("scorer/b2", self.n_outputs)

    def transition_index(self, kind: int, label: int | None) -> int:
        if kind == T.SHIFT:
            return 0
        if kind == T.LEFT_ARC:
            return 1 + label
        return 1 + self.n_labels + label

    def transition_of(self, index: int) -> T.Transition:
        if index == 0:
            return T.Transition(T.SHIFT)
        index -= 1
        if index < self.n_labels:
            return T.Transition(T.LEFT_ARC, index)
        return T.Transition(T.RIGHT_ARC, index - self.n_labels)

    def features(self, config: T.ParserConfiguration, encodings: list[Node]) -> Node:
        """Concatenation of stack[-1], stack[-2], stack[-3], buffer[0] vectors.

        ``encodings[i]`` must hold token i+1; the root and absent slots use
        the learned placeholder.
        """
        parts = []
        for depth in (1, 2, 3):
            if len(config.stack) > depth - 1 and config.stack[-depth] != 0:
                parts.append(encodings[config.stack[-depth] - 1])
            else:
                parts.append(self.placeholder)
        if config.buffer:
            parts.append(encodings[config.buffer[0] - 1])
        else:
            parts.append(self.placeholder)
        return concat(parts)

    def scores(self, config: T.ParserConfiguration, encodings: list[Node]) -> Node:
        hidden = affine_tanh([(self.hidden_weight, self.features(config, encodings))],
                             self.hidden_bias)
        return affine([(self.out_weight, hidden)], self.out_bias)

    def legal_indices(self, config: T.ParserConfiguration) -> list[int]:
        indices = []
        for kind in config.legal_kinds():
            if kind == T.SHIFT:
                indices.append(0)
            else:
                indices.extend(self.transition_index(kind, lab) for lab in range(self.n_labels))
        indices.sort()
        return indices


def greedy_parse(encoder: SentenceEncoder, scorer: TransitionScorer,
                 forms: list[str]) -> list[tuple[int, int]]:
    """Parse one sentence; returns (head, label id) per token.

    The highest-scoring legal transition is applied until the terminal
    configuration; ties break towards the lowest transition index.
    """
    encodings = encoder.encode(forms)
    config = T.ParserConfiguration(len(forms))
    steps = 0
    limit = 2 * len(forms)
    while not config.is_terminal():
        if steps >= limit:
            raise RuntimeError("parse exceeded %d transitions" % limit)
        values = scorer.scores(config, encodings).value
        masked = np.full_like(values, -np.inf)
        legal = scorer.legal_indices(config)
        masked[legal] = values[legal]
        chosen = scorer.transition_of(int(np.argmax(masked)))
        config.apply(chosen.kind, chosen.label)
        steps += 1
    if steps != limit:
        raise RuntimeError("parse finished in %d transitions, expected %d" % (steps, limit))
    return [(config.heads[i], config.labels[i]) for i in range(1, len(forms) + 1)]


def parse_to_sentence(encoder: SentenceEncoder, scorer: TransitionScorer,
                      label_vocab: Vocabulary, forms: list[str]) -> ConlluSentence:
    parsed = greedy_parse(encoder, scorer, forms)
    tokens = [Token(form=form, head=head, label=label_vocab.token_of(label))
              for form, (head, label) in zip(forms, parsed)]
    return ConlluSentence(tokens)


@dataclass
class _StepChoice:
    index: int = -1
    score: float = -np.inf


def _best_correct_and_wrong(scorer, config, costs, values, gold_heads, gold_labels):
    """Highest-scoring correct and wrong labeled transitions among legal ones."""
    best_correct, best_wrong = _StepChoice(), _StepChoice()
    for index in scorer.legal_indices(config):
        move = scorer.transition_of(index)
        target = best_correct if T.is_correct(
            config, costs, move.kind, move.label, gold_heads, gold_labels) else best_wrong
        if values[index] > target.score:
            target.index = index
            target.score = values[index]
    return best_correct, best_wrong


def sentence_training_pass(encoder, scorer, sentence: ConlluSentence,
                           label_vocab: Vocabulary, settings: TrainSettings,
                           rng, epoch: int, training: bool = True):
    """Run the oracle-guided transition sequence once; returns (loss node, hinge total).

    Hinge terms 1 + score(best wrong) - score(best correct) are collected
    whenever the margin is violated; the returned node backpropagates their
    sum (the margin constant has no gradient).
    """
    forms = sentence.forms
    gold_heads = sentence.head_array()
    gold_labels = [None] + [label_vocab.id_of(t.label) for t in sentence.tokens]
    encodings = encoder.encode(forms, training=training, rng=rng)
    config = T.ParserConfiguration(len(forms))
    loss_terms: list[Node] = []
    hinge_total = 0.0
    explore = (training and settings.oracle == "dynamic"
               and epoch >= settings.explore_from_epoch)
    while not config.is_terminal():
        costs = T.transition_costs(config, gold_heads)
        score_node = scorer.scores(config, encodings)
        values = score_node.value
        best_correct, best_wrong = _best_correct_and_wrong(
            scorer, config, costs, values, gold_heads, gold_labels)
        if best_correct.index < 0:
            raise RuntimeError("no correct transition available; oracle invariant broken")
        if best_wrong.index >= 0:
            hinge = settings.margin + best_wrong.score - best_correct.score
            if hinge > 0:
                loss_terms.append(sub(pick(score_node, best_wrong.index),
                                      pick(score_node, best_correct.index)))
                hinge_total += hinge
        if settings.oracle == "static" and training:
            move = T.static_oracle(config, gold_heads, gold_labels)
        else:
            move = scorer.transition_of(best_correct.index)
            if (explore and best_wrong.index >= 0 and best_wrong.score > best_correct.score
                    and rng.random() < settings.exploration):
                move = scorer.transition_of(best_wrong.index)
        config.apply(move.kind, move.label)
    loss_node = add_n(loss_terms) if loss_terms else None
    return loss_node, hinge_total


def sentence_loss(encoder, scorer, sentence: ConlluSentence,
                  label_vocab: Vocabulary, settings: TrainSettings) -> float:
    """Total hinge along the best-correct path, without dropout or updates."""
    _, hinge_total = sentence_training_pass(
        encoder, scorer, sentence, label_vocab, settings, rng=None, epoch=0, training=False)
    return hinge_total


@dataclass
class TrainResult:
    store: ParameterStore
    config: UnitConfig
    jamo_vocab: Vocabulary
    char_vocab: Vocabulary
    word_vocab: Vocabulary
    label_vocab: Vocabulary
    settings: TrainSettings
    history: list[dict] = field(default_factory=list)


def train(train_sentences: list[ConlluSentence],
          dev_sentences: list[ConlluSentence] | None,
          config: UnitConfig,
          settings: TrainSettings,
          embedding_vectors: dict[str, np.ndarray] | None = None,
          expand_vocabulary: bool = True,
          log=None) -> TrainResult:
    """Max-margin training with per-epoch dev model selection.

    Raises NonProjectiveError on non-projective training input. With a dev
    treebank the best-LAS parameter snapshot wins; otherwise the last epoch
    does. ``log`` receives one machine-parseable line per epoch.
    """
    if not train_sentences:
        raise ValueError("empty training treebank")
    for num, sentence in enumerate(train_sentences, start=1):
        if not is_projective(sentence):
            raise NonProjectiveError("training sentence %d is non-projective" % num)

    jamo_vocab, char_vocab, word_vocab, _ = build_vocabularies(train_sentences)
    label_vocab = build_label_vocabulary(train_sentences)
    if embedding_vectors and expand_vocabulary:
        word_vocab.add_tokens(t for t in embedding_vectors if t not in word_vocab)

    dtype = np.float32 if settings.float32 else np.float64
    store = ParameterStore(seed=settings.seed, dtype=dtype)
    encoder = SentenceEncoder(store, config, jamo_vocab, char_vocab, word_vocab)
    scorer = TransitionScorer(store, config.dim_encoder, len(label_vocab), settings.hidden_dim)
    if embedding_vectors:
        if config.dim_word == 0:
            raise ValueError("pre-trained embeddings need dim_word > 0")
        from .data import load_embeddings
        load_embeddings(embedding_vectors, word_vocab, store["word/emb"].value)

    optimizer = make_optimizer(settings.optimizer, settings.learning_rate)
    rng = store.rng  # one seeded stream drives init, shuffling, dropout, exploration
    result = TrainResult(store, config, jamo_vocab, char_vocab, word_vocab,
                         label_vocab, settings)
    best_las = -1.0
    best_state = None
    for epoch in range(1, settings.epochs + 1):
        order = rng.permutation(len(train_sentences))
        epoch_loss = 0.0
        for position in order:
            sentence = train_sentences[int(position)]
            loss_node, hinge_total = sentence_training_pass(
                encoder, scorer, sentence, label_vocab, settings, rng, epoch)
            epoch_loss += hinge_total
            if loss_node is not None:
                backward(loss_node)
                clip_gradients(store, settings.clip_norm)
                optimizer.step(store)
        entry = {"epoch": epoch, "loss": epoch_loss}
        if dev_sentences:
            predicted = [parse_to_sentence(encoder, scorer, label_vocab, s.forms)
                         for s in dev_sentences]
            uas, las = evaluate(dev_sentences, predicted)
            entry.update(uas=uas, las=las)
            if log:
                log("epoch=%d uas=%.2f las=%.2f" % (epoch, uas, las))
            if las > best_las:
                best_las = las
                best_state = store.state_dict()
        elif log:
            log("epoch=%d loss=%.4f" % (epoch, epoch_loss))
        result.history.append(entry)
    if best_state is not None:
        store.load_state_dict(best_state)
    return result
