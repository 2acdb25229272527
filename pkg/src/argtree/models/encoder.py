"""Claim-pair encoder: token + segment embeddings, mean pool, tanh projection.

Sequences are packed as [CLS] a [SEP] b [SEP] with segment 0 covering CLS,
the first claim and the first SEP, segment 1 the rest. Unknown tokens map
to PAD, which shares id 0 with padding. Each claim is truncated to a fixed
token budget before packing. Because pooling is a mean, every position
receives the same upstream gradient, which keeps the backward pass exact
and cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..text import tokenize

PAD_ID = 0
CLS_ID = 1
SEP_ID = 2
SPECIAL_TOKENS = ("<pad>", "<cls>", "<sep>")
FIRST_REGULAR_ID = len(SPECIAL_TOKENS)


@dataclass
class EncoderVocab:
    """Regular tokens get ids from 3 upward; unknown tokens collapse to PAD."""

    tokens: list[str]

    def __post_init__(self) -> None:
        self._token_to_id = {
            token: FIRST_REGULAR_ID + i for i, token in enumerate(self.tokens)
        }

    @property
    def size(self) -> int:
        return FIRST_REGULAR_ID + len(self.tokens)

    def token_id(self, token: str) -> int:
        return self._token_to_id.get(token, PAD_ID)

    def encode_tokens(self, tokens: Sequence[str]) -> list[int]:
        return [self.token_id(t) for t in tokens]


def build_encoder_vocab(texts: Iterable[str], min_count: int = 2) -> EncoderVocab:
    counts: dict[str, int] = {}
    for text in texts:
        for token in tokenize(text):
            counts[token] = counts.get(token, 0) + 1
    kept = sorted(
        (token for token, count in counts.items() if count >= min_count),
        key=lambda t: (-counts[t], t),
    )
    return EncoderVocab(tokens=kept)


def pack_pair(
    vocab: EncoderVocab, a_text: str, b_text: str, truncate: int
) -> tuple[np.ndarray, np.ndarray]:
    a_ids = vocab.encode_tokens(tokenize(a_text)[:truncate])
    b_ids = vocab.encode_tokens(tokenize(b_text)[:truncate])
    ids = [CLS_ID] + a_ids + [SEP_ID] + b_ids + [SEP_ID]
    segments = [0] * (len(a_ids) + 2) + [1] * (len(b_ids) + 1)
    return np.array(ids, dtype=np.int64), np.array(segments, dtype=np.int64)


def pack_path_flat(
    vocab: EncoderVocab, path_texts: Sequence[str], truncate: int
) -> tuple[np.ndarray, np.ndarray]:
    """Whole path in one sequence, descendant first, then each ancestor.

    [CLS] B [SEP] parent(B) [SEP] ... A [SEP]; segment 0 covers CLS, B and
    the first SEP. For a distance-one path this equals pack_pair(B, A).
    """
    if len(path_texts) < 2:
        raise ValueError("path must contain at least two claims")
    claims = [vocab.encode_tokens(tokenize(t)[:truncate]) for t in reversed(path_texts)]
    ids = [CLS_ID]
    for claim_ids in claims:
        ids.extend(claim_ids)
        ids.append(SEP_ID)
    segments = [0] * (len(claims[0]) + 2)
    segments += [1] * (len(ids) - len(segments))
    return np.array(ids, dtype=np.int64), np.array(segments, dtype=np.int64)


def pack_path_pairs(
    vocab: EncoderVocab,
    path_texts: Sequence[str],
    truncate: int,
    pair_order: str = "top_down",
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Adjacent (parent, child) pairs along the path, one packed pair each.

    top_down yields the pair nearest the ancestor first; bottom_up reverses
    the sequence order (pairs themselves keep parent first).
    """
    if len(path_texts) < 2:
        raise ValueError("path must contain at least two claims")
    if pair_order not in ("top_down", "bottom_up"):
        raise ValueError(f"unknown pair order {pair_order!r}")
    pairs = [
        pack_pair(vocab, path_texts[i], path_texts[i + 1], truncate)
        for i in range(len(path_texts) - 1)
    ]
    if pair_order == "bottom_up":
        pairs.reverse()
    return pairs


@dataclass
class EncoderParams:
    tok_emb: np.ndarray  # vocab x dim
    seg_emb: np.ndarray  # 2 x dim
    proj_w: np.ndarray  # dim x dim
    proj_b: np.ndarray  # dim

    @property
    def dim(self) -> int:
        return self.tok_emb.shape[1]

    def zeros_like(self) -> "EncoderParams":
        return EncoderParams(
            tok_emb=np.zeros_like(self.tok_emb),
            seg_emb=np.zeros_like(self.seg_emb),
            proj_w=np.zeros_like(self.proj_w),
            proj_b=np.zeros_like(self.proj_b),
        )


@dataclass
class EncodeCache:
    ids: np.ndarray
    segments: np.ndarray
    pool: np.ndarray
    h: np.ndarray


def encode(params: EncoderParams, ids: np.ndarray, segments: np.ndarray) -> EncodeCache:
    pool = (params.tok_emb[ids].sum(axis=0) + params.seg_emb[segments].sum(axis=0)) / len(ids)
    h = np.tanh(params.proj_w @ pool + params.proj_b)
    return EncodeCache(ids=ids, segments=segments, pool=pool, h=h)


def encode_backward(
    params: EncoderParams, cache: EncodeCache, dh: np.ndarray, grads: EncoderParams
) -> None:
    """Accumulate parameter gradients for one encoded sequence."""
    du = dh * (1.0 - cache.h * cache.h)
    grads.proj_w += np.outer(du, cache.pool)
    grads.proj_b += du
    dpool = params.proj_w.T @ du
    dtoken = dpool / len(cache.ids)
    np.add.at(grads.tok_emb, cache.ids, dtoken)
    np.add.at(grads.seg_emb, cache.segments, dtoken)
