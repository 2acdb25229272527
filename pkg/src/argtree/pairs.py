"""Claim-pair dataset derivation and topic-level splits.

Two tasks are derived from ancestor/descendant pairs:

* relative specificity: the descendant is the more specific claim; pair
  order is randomized by a seeded coin so presentation order carries no
  signal, and models never see path information.
* relative stance: a descendant supports its ancestor exactly when the
  number of con edges on the connecting path is even; examples carry the
  full path so path-aware models can read intermediate claims.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator, Optional, Sequence

from .trees import ArgumentTree, StanceEdge, ancestor_descendant_pairs, path_between

DEFAULT_SPECIFICITY_MAX_DISTANCE = 5
DEFAULT_STANCE_MAX_DISTANCE = 4


class SpecificityLabel(Enum):
    SECOND_MORE_SPECIFIC = "second_more_specific"
    FIRST_MORE_SPECIFIC = "first_more_specific"


class StanceLabel(Enum):
    SUPPORTS = "supports"
    OPPOSES = "opposes"


@dataclass
class SpecificityExample:
    topic_id: str
    first_id: str
    second_id: str
    first_text: str
    second_text: str
    distance: int
    label: SpecificityLabel
    same_stance: Optional[bool]


@dataclass
class StanceExample:
    topic_id: str
    a_id: str
    b_id: str
    distance: int
    path_texts: list[str]
    path_edges: list[StanceEdge]
    label: StanceLabel
    same_stance: Optional[bool]


def derive_stance_label(path_edges: Sequence[StanceEdge]) -> StanceLabel:
    """Supports iff the path carries an even number of con edges."""
    if not path_edges:
        raise ValueError("empty path")
    con = sum(1 for edge in path_edges if edge is StanceEdge.CON)
    return StanceLabel.SUPPORTS if con % 2 == 0 else StanceLabel.OPPOSES


def _orientation_flip(seed: int, topic_id: str, a_id: str, b_id: str) -> bool:
    """Seeded coin for pair presentation order, stable across runs."""
    digest = hashlib.sha256(
        f"{seed}:{topic_id}:{a_id}:{b_id}".encode("utf-8")
    ).digest()
    return bool(digest[0] & 1)


def _same_stance(tree: ArgumentTree, ancestor_id: str, descendant_id: str) -> Optional[bool]:
    ancestor = tree.nodes[ancestor_id]
    if ancestor.stance_to_parent is None:
        return None
    return ancestor.stance_to_parent is tree.nodes[descendant_id].stance_to_parent


def derive_specificity_examples(
    trees: Iterable[ArgumentTree],
    max_distance: int = DEFAULT_SPECIFICITY_MAX_DISTANCE,
    seed: int = 0,
) -> Iterator[SpecificityExample]:
    """One example per ancestor/descendant pair within the distance cap.

    The descendant is presented second when the seeded coin lands 0, in
    which case the label is SECOND_MORE_SPECIFIC; otherwise the pair is
    swapped and the label is FIRST_MORE_SPECIFIC. The same-stance flag
    compares the two claims' stances toward their own parents and is
    None when the ancestor is the thesis.
    """
    for tree in trees:
        for ancestor_id, descendant_id, distance in ancestor_descendant_pairs(tree, max_distance):
            flip = _orientation_flip(seed, tree.topic_id, ancestor_id, descendant_id)
            ancestor_text = tree.nodes[ancestor_id].text
            descendant_text = tree.nodes[descendant_id].text
            if flip:
                first_id, second_id = descendant_id, ancestor_id
                first_text, second_text = descendant_text, ancestor_text
                label = SpecificityLabel.FIRST_MORE_SPECIFIC
            else:
                first_id, second_id = ancestor_id, descendant_id
                first_text, second_text = ancestor_text, descendant_text
                label = SpecificityLabel.SECOND_MORE_SPECIFIC
            yield SpecificityExample(
                topic_id=tree.topic_id,
                first_id=first_id,
                second_id=second_id,
                first_text=first_text,
                second_text=second_text,
                distance=distance,
                label=label,
                same_stance=_same_stance(tree, ancestor_id, descendant_id),
            )


def derive_stance_examples(
    trees: Iterable[ArgumentTree],
    max_distance: int = DEFAULT_STANCE_MAX_DISTANCE,
) -> Iterator[StanceExample]:
    """One labeled example per pair, with the full ancestor-to-descendant path."""
    for tree in trees:
        for ancestor_id, descendant_id, distance in ancestor_descendant_pairs(tree, max_distance):
            chain, edges = path_between(tree, ancestor_id, descendant_id)
            yield StanceExample(
                topic_id=tree.topic_id,
                a_id=ancestor_id,
                b_id=descendant_id,
                distance=distance,
                path_texts=[tree.nodes[node_id].text for node_id in chain],
                path_edges=edges,
                label=derive_stance_label(edges),
                same_stance=_same_stance(tree, ancestor_id, descendant_id),
            )


@dataclass
class TopicSplit:
    train: frozenset[str]
    dev: frozenset[str]
    test: frozenset[str]
    seed: int
    ratios: tuple[float, float, float]

    def part(self, name: str) -> frozenset[str]:
        if name not in ("train", "dev", "test"):
            raise ValueError(f"unknown split part {name!r}")
        return getattr(self, name)


def split_by_topic(
    topic_ids: Sequence[str],
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
) -> TopicSplit:
    """Disjoint train/dev/test topic sets via seeded shuffle.

    Topic ids are sorted, shuffled with the seed, then assigned
    contiguously. Sizes follow the largest-remainder rule, so each split
    differs from its exact ratio share by less than one topic.
    """
    if len(set(topic_ids)) != len(topic_ids):
        raise ValueError("duplicate topic ids")
    if len(topic_ids) < 3:
        raise ValueError("fewer topics than splits")
    if abs(sum(ratios) - 1.0) > 1e-9 or any(r < 0 for r in ratios):
        raise ValueError(f"ratios must be non-negative and sum to 1, got {ratios!r}")
    ordered = sorted(topic_ids)
    random.Random(seed).shuffle(ordered)
    n = len(ordered)
    exact = [n * r for r in ratios]
    sizes = [int(x) for x in exact]
    remainder = n - sum(sizes)
    by_fraction = sorted(range(3), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in range(remainder):
        sizes[by_fraction[i]] += 1
    train = ordered[: sizes[0]]
    dev = ordered[sizes[0] : sizes[0] + sizes[1]]
    test = ordered[sizes[0] + sizes[1] :]
    return TopicSplit(
        train=frozenset(train),
        dev=frozenset(dev),
        test=frozenset(test),
        seed=seed,
        ratios=tuple(ratios),
    )


SPLIT_SCHEMA = "argtree-split/1"


def write_split(split: TopicSplit, stream: IO[str]) -> None:
    record = {
        "schema": SPLIT_SCHEMA,
        "seed": split.seed,
        "ratios": list(split.ratios),
        "train": sorted(split.train),
        "dev": sorted(split.dev),
        "test": sorted(split.test),
    }
    json.dump(record, stream, ensure_ascii=False, indent=2)
    stream.write("\n")


def write_split_file(split: TopicSplit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        write_split(split, handle)


def read_split_file(path: str) -> TopicSplit:
    with open(path, encoding="utf-8") as handle:
        record = json.load(handle)
    if record.get("schema") != SPLIT_SCHEMA:
        raise ValueError(f"schema mismatch in split file {path!r}")
    return TopicSplit(
        train=frozenset(record["train"]),
        dev=frozenset(record["dev"]),
        test=frozenset(record["test"]),
        seed=int(record["seed"]),
        ratios=tuple(record["ratios"]),
    )


def _same_stance_to_json(value: Optional[bool]):
    return "n/a" if value is None else value


def _same_stance_from_json(value) -> Optional[bool]:
    if value == "n/a":
        return None
    return bool(value)


def specificity_to_record(example: SpecificityExample) -> dict:
    return {
        "task": "specificity",
        "topic_id": example.topic_id,
        "first_id": example.first_id,
        "second_id": example.second_id,
        "first_text": example.first_text,
        "second_text": example.second_text,
        "distance": example.distance,
        "label": example.label.value,
        "same_stance": _same_stance_to_json(example.same_stance),
    }


def stance_to_record(example: StanceExample) -> dict:
    return {
        "task": "stance",
        "topic_id": example.topic_id,
        "a_id": example.a_id,
        "b_id": example.b_id,
        "distance": example.distance,
        "path_texts": example.path_texts,
        "path_edges": [edge.value for edge in example.path_edges],
        "label": example.label.value,
        "same_stance": _same_stance_to_json(example.same_stance),
    }


def write_pairs(examples: Iterable[SpecificityExample | StanceExample], stream: IO[str]) -> None:
    for example in examples:
        if isinstance(example, SpecificityExample):
            record = specificity_to_record(example)
        else:
            record = stance_to_record(example)
        stream.write(json.dumps(record, ensure_ascii=False))
        stream.write("\n")


def write_pairs_file(examples: Iterable[SpecificityExample | StanceExample], path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        write_pairs(examples, handle)


def read_pairs(stream: IO[str] | Iterable[str]) -> Iterator[SpecificityExample | StanceExample]:
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        record = json.loads(line)
        task = record.get("task")
        if task == "specificity":
            yield SpecificityExample(
                topic_id=record["topic_id"],
                first_id=record["first_id"],
                second_id=record["second_id"],
                first_text=record["first_text"],
                second_text=record["second_text"],
                distance=int(record["distance"]),
                label=SpecificityLabel(record["label"]),
                same_stance=_same_stance_from_json(record["same_stance"]),
            )
        elif task == "stance":
            yield StanceExample(
                topic_id=record["topic_id"],
                a_id=record["a_id"],
                b_id=record["b_id"],
                distance=int(record["distance"]),
                path_texts=list(record["path_texts"]),
                path_edges=[StanceEdge(e) for e in record["path_edges"]],
                label=StanceLabel(record["label"]),
                same_stance=_same_stance_from_json(record["same_stance"]),
            )
        else:
            raise ValueError(f"line {line_no}: unknown task {task!r}")


def read_pairs_file(path: str) -> list[SpecificityExample | StanceExample]:
    with open(path, encoding="utf-8") as handle:
        return list(read_pairs(handle))
