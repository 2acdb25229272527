"""Trivial baselines: majority class and token-length comparison."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ..pairs import SpecificityLabel
from ..text import tokenize


@dataclass
class MajorityBaseline:
    label: str
    counts: dict[str, int]
    task: str = "specificity"

    def predict_label(self) -> str:
        return self.label


def majority_fit(
    labels: Sequence[str], tie_preference: str, task: str = "specificity"
) -> MajorityBaseline:
    """Most frequent label; ties break toward tie_preference."""
    if not labels:
        raise ValueError("no labels to fit")
    counts = Counter(labels)
    best = max(counts.values())
    winners = sorted(label for label, count in counts.items() if count == best)
    label = tie_preference if tie_preference in winners else winners[0]
    return MajorityBaseline(label=label, counts=dict(sorted(counts.items())), task=task)


@dataclass
class LengthBaseline:
    """Parameter-free comparator wrapped as a model for uniform storage."""

    task: str = "specificity"

    def predict(self, first_text: str, second_text: str) -> SpecificityLabel:
        return length_predict(first_text, second_text)


def length_predict(first_text: str, second_text: str) -> SpecificityLabel:
    """Longer claim (canonical token count) is the more specific one.

    Ties predict the second claim, so the comparator is deterministic.
    """
    if len(tokenize(second_text)) >= len(tokenize(first_text)):
        return SpecificityLabel.SECOND_MORE_SPECIFIC
    return SpecificityLabel.FIRST_MORE_SPECIFIC
