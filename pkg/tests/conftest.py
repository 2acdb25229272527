"""Shared fixtures: a small hand-built tree and corpus helpers."""

from __future__ import annotations

import pytest

from argtree.trees import ArgumentTree, StanceEdge, build_tree


@pytest.fixture()
def uniform_tree() -> ArgumentTree:
    """Hand-built debate tree used across modules.

    Layout (depth in parentheses, stance toward parent):

        c0 (0)  thesis
        ├── c1 (1) pro
        │   ├── c3 (2) con
        │   │   └── c5 (3) con
        │   └── c4 (2) pro
        └── c2 (1) con
            └── c6 (2) pro
    """
    return build_tree(
        topic_id="uniforms",
        claims=[
            ("c0", None, None, "School uniforms should be mandatory in public schools?"),
            ("c1", "c0", StanceEdge.PRO, "Uniforms reduce visible income differences between students."),
            ("c2", "c0", StanceEdge.CON, "Uniforms restrict the personal expression of students."),
            ("c3", "c1", StanceEdge.CON, "Brand shoes and accessories still signal income differences."),
            ("c4", "c1", StanceEdge.PRO, "Morning routines get faster when the outfit question is settled."),
            ("c5", "c3", StanceEdge.CON, "Most schools ban conspicuous accessories alongside the uniform policy."),
            ("c6", "c2", StanceEdge.PRO, "Dress codes in general have been struck down as overreaching before."),
        ],
        tags=frozenset({"handmade"}),
    )


@pytest.fixture()
def uniform_corpus(uniform_tree) -> list[ArgumentTree]:
    """Two-topic corpus: the uniforms tree plus a depth-1 sibling topic."""
    second = build_tree(
        topic_id="homework",
        claims=[
            ("c0", None, None, "Daily homework should be abolished in primary school?"),
            ("c1", "c0", StanceEdge.PRO, "Young children need unstructured play for healthy development."),
            ("c2", "c0", StanceEdge.CON, "Homework builds routines that later school years depend on."),
        ],
    )
    return [uniform_tree, second]
