"""From-scratch neural claim-pair and path classifiers.

Three model kinds share one training loop:

- "pair": encode the two claims as a single packed pair and classify the
  pooled representation. For path data the pair is (descendant, ancestor),
  so the model sees only the endpoints.
- "path-flat": encode the whole path as one packed sequence (descendant
  first) and classify it; at distance one this is exactly the pair model's
  input.
- "path-hier": encode each adjacent (parent, child) pair along the path,
  feed the pair vectors to a bidirectional GRU, and classify the
  concatenation of the forward output at the last position and the
  backward output at the first.

All matrices initialize uniformly in +-1/sqrt(fan_in) with fan_in the
column count; biases start at zero. L2 applies to 2-D blocks only.
Training is seeded mini-batch gradient descent with best-dev
checkpointing, early stopping on dev accuracy, and a divergence guard.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from ..pairs import SpecificityExample, StanceExample
from .config import (
    DIVERGENCE_EPOCHS,
    DIVERGENCE_FACTOR,
    EncoderConfig,
    EpochStats,
    TrainConfig,
    TrainingDivergedError,
    neural_train_config,
)
from .encoder import (
    EncodeCache,
    EncoderParams,
    EncoderVocab,
    build_encoder_vocab,
    encode,
    encode_backward,
    pack_pair,
    pack_path_flat,
    pack_path_pairs,
)
from .gru import GRU_BLOCK_NAMES, BiGRUParams, GRUParams, bigru_backward, bigru_forward

MODEL_KINDS = ("pair", "path-flat", "path-hier")

Example = Union[SpecificityExample, StanceExample]


@dataclass
class NeuralParams:
    encoders: list[EncoderParams]
    gru: Optional[BiGRUParams]
    cls_w: np.ndarray
    cls_b: np.ndarray

    def zeros_like(self) -> "NeuralParams":
        return NeuralParams(
            encoders=[enc.zeros_like() for enc in self.encoders],
            gru=self.gru.zeros_like() if self.gru is not None else None,
            cls_w=np.zeros_like(self.cls_w),
            cls_b=np.zeros_like(self.cls_b),
        )

    def encoder_for(self, position: int) -> EncoderParams:
        return self.encoders[min(position, len(self.encoders) - 1)]

    def blocks(self) -> dict[str, np.ndarray]:
        """Named views of every parameter array, in a canonical order."""
        out: dict[str, np.ndarray] = {}
        if len(self.encoders) == 1:
            prefixes = ["enc"]
        else:
            prefixes = [f"enc{i}" for i in range(len(self.encoders))]
        for prefix, enc in zip(prefixes, self.encoders):
            out[f"{prefix}/tok_emb"] = enc.tok_emb
            out[f"{prefix}/seg_emb"] = enc.seg_emb
            out[f"{prefix}/proj_w"] = enc.proj_w
            out[f"{prefix}/proj_b"] = enc.proj_b
        if self.gru is not None:
            for direction, params in (("gru_fwd", self.gru.fwd), ("gru_bwd", self.gru.bwd)):
                for name in GRU_BLOCK_NAMES:
                    out[f"{direction}/{name}"] = getattr(params, name)
        out["cls/w"] = self.cls_w
        out["cls/b"] = self.cls_b
        return out

    def parameter_count(self) -> int:
        return sum(block.size for block in self.blocks().values())


def _uniform(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    bound = 1.0 / math.sqrt(cols)
    return rng.uniform(-bound, bound, size=(rows, cols))


def _init_gru(rng: np.random.Generator, hidden: int, input_dim: int) -> GRUParams:
    return GRUParams(
        w_z=_uniform(rng, hidden, input_dim),
        u_z=_uniform(rng, hidden, hidden),
        b_z=np.zeros(hidden),
        w_r=_uniform(rng, hidden, input_dim),
        u_r=_uniform(rng, hidden, hidden),
        b_r=np.zeros(hidden),
        w_h=_uniform(rng, hidden, input_dim),
        u_h=_uniform(rng, hidden, hidden),
        b_h=np.zeros(hidden),
    )


def init_params(
    kind: str, vocab_size: int, config: EncoderConfig, seed: int
) -> NeuralParams:
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    rng = np.random.default_rng(seed)
    encoder_count = 1
    if kind == "path-hier" and not config.share_encoder:
        encoder_count = config.max_positions
    encoders = []
    for _ in range(encoder_count):
        encoders.append(
            EncoderParams(
                tok_emb=_uniform(rng, vocab_size, config.dim),
                seg_emb=_uniform(rng, 2, config.dim),
                proj_w=_uniform(rng, config.dim, config.dim),
                proj_b=np.zeros(config.dim),
            )
        )
    gru = None
    cls_input = config.dim
    if kind == "path-hier":
        gru = BiGRUParams(
            fwd=_init_gru(rng, config.hidden, config.dim),
            bwd=_init_gru(rng, config.hidden, config.dim),
        )
        cls_input = 2 * config.hidden
    return NeuralParams(
        encoders=encoders,
        gru=gru,
        cls_w=_uniform(rng, 2, cls_input),
        cls_b=np.zeros(2),
    )


@dataclass
class PackedExample:
    sequences: list[tuple[np.ndarray, np.ndarray]]
    label_index: int


def example_texts(example: Example) -> list[str]:
    if isinstance(example, SpecificityExample):
        return [example.first_text, example.second_text]
    return list(example.path_texts)


def example_sequences(
    kind: str, example: Example, vocab: EncoderVocab, config: EncoderConfig
) -> list[tuple[np.ndarray, np.ndarray]]:
    if isinstance(example, SpecificityExample):
        if kind != "pair":
            raise ValueError("path models need path examples, not claim pairs")
        return [pack_pair(vocab, example.first_text, example.second_text, config.truncate)]
    if kind == "pair":
        return [
            pack_pair(vocab, example.path_texts[-1], example.path_texts[0], config.truncate)
        ]
    if kind == "path-flat":
        return [pack_path_flat(vocab, example.path_texts, config.truncate)]
    if kind == "path-hier":
        return pack_path_pairs(vocab, example.path_texts, config.truncate, config.pair_order)
    raise ValueError(f"unknown model kind {kind!r}")


def pack_dataset(
    kind: str,
    examples: Sequence[Example],
    vocab: EncoderVocab,
    config: EncoderConfig,
    label_names: Sequence[str],
) -> list[PackedExample]:
    index = {name: i for i, name in enumerate(label_names)}
    packed = []
    for example in examples:
        label = example.label.value
        if label not in index:
            raise ValueError(f"unknown label {label!r}")
        packed.append(
            PackedExample(
                sequences=example_sequences(kind, example, vocab, config),
                label_index=index[label],
            )
        )
    return packed


@dataclass
class ForwardCache:
    encode_caches: list[EncodeCache]
    gru_cache: object
    representation: np.ndarray
    probs: np.ndarray


def forward_example(
    kind: str, params: NeuralParams, packed: PackedExample
) -> ForwardCache:
    encode_caches = [
        encode(params.encoder_for(k), ids, segments)
        for k, (ids, segments) in enumerate(packed.sequences)
    ]
    gru_cache = None
    if kind == "path-hier":
        xs = np.stack([cache.h for cache in encode_caches])
        fwd_states, bwd_states, gru_cache = bigru_forward(params.gru, xs)
        representation = np.concatenate([fwd_states[-1], bwd_states[0]])
    else:
        representation = encode_caches[0].h
    logits = params.cls_w @ representation + params.cls_b
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    probs = exp / exp.sum()
    return ForwardCache(
        encode_caches=encode_caches,
        gru_cache=gru_cache,
        representation=representation,
        probs=probs,
    )


def backward_example(
    kind: str,
    params: NeuralParams,
    packed: PackedExample,
    cache: ForwardCache,
    grads: NeuralParams,
    scale: float,
) -> None:
    dlogits = cache.probs.copy()
    dlogits[packed.label_index] -= 1.0
    dlogits *= scale
    grads.cls_w += np.outer(dlogits, cache.representation)
    grads.cls_b += dlogits
    drep = params.cls_w.T @ dlogits
    if kind == "path-hier":
        hidden = params.gru.fwd.hidden
        steps = len(packed.sequences)
        dh_fwd = np.zeros((steps, hidden))
        dh_bwd = np.zeros((steps, hidden))
        dh_fwd[-1] = drep[:hidden]
        dh_bwd[0] = drep[hidden:]
        dxs = bigru_backward(params.gru, cache.gru_cache, dh_fwd, dh_bwd, grads.gru)
        for k, encode_cache in enumerate(cache.encode_caches):
            encode_backward(
                params.encoder_for(k),
                encode_cache,
                dxs[k],
                grads.encoder_for(k),
            )
    else:
        encode_backward(params.encoders[0], cache.encode_caches[0], drep, grads.encoders[0])


def _l2_penalty(params: NeuralParams, l2: float) -> float:
    if l2 == 0.0:
        return 0.0
    total = 0.0
    for block in params.blocks().values():
        if block.ndim == 2:
            total += float((block * block).sum())
    return 0.5 * l2 * total


def batch_loss_and_grads(
    kind: str, params: NeuralParams, batch: Sequence[PackedExample], l2: float
) -> tuple[float, NeuralParams]:
    """Mean cross-entropy over the batch plus L2 on 2-D blocks."""
    grads = params.zeros_like()
    scale = 1.0 / len(batch)
    data_loss = 0.0
    eps = 1e-12
    for packed in batch:
        cache = forward_example(kind, params, packed)
        data_loss -= math.log(float(cache.probs[packed.label_index]) + eps)
        backward_example(kind, params, packed, cache, grads, scale)
    if l2 != 0.0:
        param_blocks = params.blocks()
        for name, gblock in grads.blocks().items():
            if gblock.ndim == 2:
                gblock += l2 * param_blocks[name]
    return data_loss * scale + _l2_penalty(params, l2), grads


def dataset_loss(
    kind: str, params: NeuralParams, packed: Sequence[PackedExample], l2: float
) -> float:
    eps = 1e-12
    total = 0.0
    for example in packed:
        cache = forward_example(kind, params, example)
        total -= math.log(float(cache.probs[example.label_index]) + eps)
    return total / len(packed) + _l2_penalty(params, l2)


def predict_packed(kind: str, params: NeuralParams, packed: Sequence[PackedExample]) -> np.ndarray:
    out = np.zeros(len(packed), dtype=np.int64)
    for i, example in enumerate(packed):
        cache = forward_example(kind, params, example)
        out[i] = int(np.argmax(cache.probs))
    return out


@dataclass
class NeuralModel:
    kind: str
    task: str
    label_names: list[str]
    vocab: EncoderVocab
    encoder_config: EncoderConfig
    params: NeuralParams
    seed: int
    history: list[EpochStats] = field(default_factory=list)

    def predict_labels(self, examples: Sequence[Example]) -> list[str]:
        packed = pack_dataset(
            self.kind, examples, self.vocab, self.encoder_config, self.label_names
        )
        indices = predict_packed(self.kind, self.params, packed)
        return [self.label_names[i] for i in indices]


def _batches(n: int, batch_size: int, order: np.ndarray) -> Iterator[np.ndarray]:
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def train_neural(
    kind: str,
    task: str,
    train_examples: Sequence[Example],
    dev_examples: Optional[Sequence[Example]] = None,
    encoder_config: Optional[EncoderConfig] = None,
    train_config: Optional[TrainConfig] = None,
    vocab: Optional[EncoderVocab] = None,
) -> NeuralModel:
    encoder_config = encoder_config or EncoderConfig()
    encoder_config.validate()
    train_config = train_config or neural_train_config()
    train_config.validate()
    if not train_examples:
        raise ValueError("no training examples")
    if vocab is None:
        vocab = build_encoder_vocab(
            (text for example in train_examples for text in example_texts(example)),
            min_count=encoder_config.min_count,
        )
    label_names = sorted({example.label.value for example in train_examples})
    if len(label_names) != 2:
        raise ValueError(f"expected exactly 2 classes, got {label_names}")
    packed_train = pack_dataset(kind, train_examples, vocab, encoder_config, label_names)
    packed_dev = None
    dev_labels = None
    if dev_examples:
        packed_dev = pack_dataset(kind, dev_examples, vocab, encoder_config, label_names)
        dev_labels = np.array([p.label_index for p in packed_dev])

    params = init_params(kind, vocab.size, encoder_config, train_config.seed)
    rng = np.random.default_rng(train_config.seed)
    history: list[EpochStats] = []
    best_params = copy.deepcopy(params)
    best_dev = -1.0
    stale = 0
    initial_loss: Optional[float] = None
    high_loss_streak = 0

    for epoch in range(1, train_config.max_epochs + 1):
        order = rng.permutation(len(packed_train))
        for batch_indices in _batches(len(packed_train), train_config.batch_size, order):
            batch = [packed_train[i] for i in batch_indices]
            _, grads = batch_loss_and_grads(kind, params, batch, train_config.l2)
            grad_blocks = grads.blocks()
            for name, block in params.blocks().items():
                block -= train_config.learning_rate * grad_blocks[name]
        epoch_loss = dataset_loss(kind, params, packed_train, train_config.l2)
        if not np.isfinite(epoch_loss):
            raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
        if initial_loss is None:
            initial_loss = epoch_loss
        if epoch_loss > DIVERGENCE_FACTOR * initial_loss:
            high_loss_streak += 1
            if high_loss_streak >= DIVERGENCE_EPOCHS:
                raise TrainingDivergedError(
                    f"loss {epoch_loss:.4f} exceeded {DIVERGENCE_FACTOR}x the initial "
                    f"loss for {DIVERGENCE_EPOCHS} consecutive epochs"
                )
        else:
            high_loss_streak = 0

        dev_accuracy: Optional[float] = None
        if packed_dev is not None:
            predictions = predict_packed(kind, params, packed_dev)
            dev_accuracy = float(np.mean(predictions == dev_labels))
        history.append(EpochStats(epoch=epoch, train_loss=epoch_loss, dev_accuracy=dev_accuracy))

        if dev_accuracy is not None:
            if dev_accuracy > best_dev:
                best_dev = dev_accuracy
                best_params = copy.deepcopy(params)
                stale = 0
            else:
                stale += 1
                if train_config.patience and stale >= train_config.patience:
                    break
        else:
            best_params = params

    return NeuralModel(
        kind=kind,
        task=task,
        label_names=label_names,
        vocab=vocab,
        encoder_config=encoder_config,
        params=best_params,
        seed=train_config.seed,
        history=history,
    )
