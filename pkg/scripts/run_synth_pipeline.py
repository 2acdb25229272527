#!/usr/bin/env python3
"""End-to-end demo: synthesize a corpus, train stance models, compare them.

Runs the `argtree` CLI in-process, step by step, inside a work directory:

    synth -> validate -> stats -> split -> derive-pairs -> train (majority,
    pair, path-hier) -> evaluate -> report -> significance

The generated corpus plants a stance marker on child claims that is only
reliable for the directly connected pair, so the endpoint-only pair model
degrades at distance >= 2 while the hierarchical path model can compose
the per-edge signals. The full-size version of this experiment (with its
pinned expectations) lives in tests/test_acceptance.py; this script uses a
smaller corpus so a laptop run finishes in a couple of minutes.

Usage:
    python scripts/run_synth_pipeline.py [--workdir DIR] [--topics N]
                                         [--epochs N] [--seed N] [--quick]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from argtree.cli import main as argtree


def run(*argv: object) -> None:
    rendered = [str(part) for part in argv]
    print(f"\n$ argtree {' '.join(rendered)}")
    code = argtree(rendered)
    if code != 0:
        sys.exit(f"step failed with exit code {code}: argtree {' '.join(rendered)}")


def build_cli() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--workdir", default="synth-pipeline", help="output directory")
    parser.add_argument("--topics", type=int, default=100, help="synthetic topics")
    parser.add_argument("--epochs", type=int, default=24, help="neural training epochs")
    parser.add_argument("--seed", type=int, default=11, help="training seed")
    parser.add_argument(
        "--quick", action="store_true", help="smaller corpus (faster smoke run)"
    )
    return parser


def main() -> None:
    args = build_cli().parse_args()
    topics = 40 if args.quick else args.topics
    epochs = 24 if args.quick else args.epochs

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)

    synth_conf = work / "synth.conf"
    synth_conf.write_text(
        "\n".join(
            [
                "# depth-4 chains; the planted marker is reliable only per edge",
                f"topic_count = {topics}",
                "branch_min = 2",
                "branch_max = 2",
                "depth_min = 4",
                "depth_max = 4",
                "con_probability = 0.53",
                "length_signal_p = 0.0",
                "stance_marker_p = 0.95",
                "root_len_min = 9",
                "root_len_max = 11",
                "min_claim_tokens = 6",
                "seed = 101",
                "",
            ]
        ),
        encoding="utf-8",
    )
    train_conf = work / "train.conf"
    train_conf.write_text(
        "\n".join(
            [
                "learning_rate = 0.3",
                "batch_size = 16",
                f"max_epochs = {epochs}",
                "patience = 0",
                "",
            ]
        ),
        encoding="utf-8",
    )

    corpus = work / "corpus.jsonl"
    ledger = work / "ledger.jsonl"
    split = work / "split.json"
    pairs = {part: work / f"stance-{part}.jsonl" for part in ("train", "dev", "test")}

    run("synth", "--config", synth_conf, "-o", corpus, "--ledger", ledger)
    run("validate", corpus)
    run("stats", corpus)
    run("split", corpus, "--ratios", "0.6,0.2,0.2", "--seed", "7", "-o", split)
    for part, path in pairs.items():
        run(
            "derive-pairs", corpus, "--task", "stance",
            "--split", split, "--part", part, "-o", path,
        )

    checkpoints = {}
    for model in ("majority", "pair", "path-hier"):
        checkpoint = work / f"{model}.ckpt"
        checkpoints[model] = checkpoint
        command = [
            "train", "--model", model, "--task", "stance",
            "--train", pairs["train"], "-o", checkpoint,
        ]
        if model != "majority":
            command += ["--dev", pairs["dev"], "--config", train_conf, "--seed", args.seed]
        run(*command)

    csvs = []
    for model, checkpoint in checkpoints.items():
        csv_path = work / f"eval-{model}.csv"
        csvs.append(csv_path)
        run(
            "evaluate", "--model", checkpoint, "--test", pairs["test"],
            "--name", model, "-o", csv_path,
        )

    run("report", *csvs, "-o", work / "report.csv")
    run(
        "significance",
        "--model-a", checkpoints["pair"],
        "--model-b", checkpoints["path-hier"],
        "--test", pairs["test"],
    )
    print(f"\nartifacts in {work}/")


if __name__ == "__main__":
    main()
