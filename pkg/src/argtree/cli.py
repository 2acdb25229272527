"""Command-line front door: one `argtree` command, twelve subcommands.

Exit codes: 0 success, 1 data errors (bad files, failed validation,
diverged training), 2 usage errors (bad flags, bad config keys). Every
output file is written atomically (temp file in the target directory,
then rename). The effective configuration of each run is logged to
stderr. Seeds resolve as: --seed flag, then the config file, then the
ARGTREE_SEED environment variable, then 0.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
import tempfile
from typing import Callable, IO, Optional, Sequence, Union

from . import corpus_io, stats as stats_mod
from .evaluation import (
    EvalItem,
    EvalReport,
    Stratum,
    dump_report,
    merge_reports_wide,
    paired_t_test,
    paired_topic_vectors,
    report_csv_rows,
    report_to_text,
    stratified_eval,
    wide_table_text,
)
from .features import (
    Lexicon,
    build_vocabulary,
    featurize_specificity,
    featurize_stance,
    read_embeddings_file,
    read_features_file,
    read_lexicon_file,
    read_vocabulary_file,
    write_features,
    write_vocabulary,
)
from .models import (
    EncoderConfig,
    LengthBaseline,
    LogisticRegressionModel,
    MajorityBaseline,
    NeuralModel,
    TrainConfig,
    dump_checkpoint,
    gradcheck_logreg,
    gradcheck_neural,
    length_predict,
    load_model,
    majority_fit,
    model_payload,
    train_logreg,
    train_neural,
    LOGREG_TOLERANCE,
    NEURAL_TOLERANCE,
)
from .pairs import (
    SpecificityExample,
    derive_specificity_examples,
    derive_stance_examples,
    read_pairs_file,
    read_split_file,
    split_by_topic,
    write_pairs,
    write_split,
)
from .synth import SynthConfig, generate_corpus
from .trees import node_depth, validate_tree

DEFAULT_MAX_DISTANCE = {"specificity": 5, "stance": 4}


class UsageError(Exception):
    """Bad flags or configuration; exits 2 with the subcommand synopsis."""


_CONFIG_KEY_TYPES: dict[str, type] = {
    # shared
    "seed": int,
    "alpha": float,
    # training
    "learning_rate": float,
    "l2": float,
    "batch_size": int,
    "max_epochs": int,
    "patience": int,
    "tie_preference": str,
    # encoder architecture
    "dim": int,
    "hidden": int,
    "truncate": int,
    "pair_order": str,
    "share_encoder": bool,
    "max_positions": int,
    "min_count": int,
    # synthetic corpus generation
    "topic_count": int,
    "branch_min": int,
    "branch_max": int,
    "depth_min": int,
    "depth_max": int,
    "con_probability": float,
    "length_signal_p": float,
    "stance_marker_p": float,
    "connective_p": float,
    "concepts_per_topic": int,
    "filler_count": int,
    "root_len_min": int,
    "root_len_max": int,
    "min_claim_tokens": int,
    "two_sentence_p": float,
}

_BOOL_VALUES = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _parse_config_value(key: str, raw: str, path: str) -> Union[int, float, str, bool]:
    expected = _CONFIG_KEY_TYPES[key]
    try:
        if expected is bool:
            lowered = raw.lower()
            if lowered not in _BOOL_VALUES:
                raise ValueError(raw)
            return _BOOL_VALUES[lowered]
        return expected(raw)
    except ValueError:
        raise UsageError(
            f"config {path}: bad value {raw!r} for key {key!r} (expected {expected.__name__})"
        ) from None


def load_run_config(path: Optional[str]) -> dict:
    """Flat `key = value` file; unknown keys are rejected."""
    if path is None:
        return {}
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    config: dict = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise UsageError(f"config {path}: line {line_no} is not `key = value`")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in _CONFIG_KEY_TYPES:
                raise UsageError(f"config {path}: unknown key {key!r}")
            if key in config:
                raise UsageError(f"config {path}: duplicate key {key!r}")
            config[key] = _parse_config_value(key, raw, path)
    return config


def resolve_seed(flag_seed: Optional[int], config: dict) -> int:
    if flag_seed is not None:
        return flag_seed
    if "seed" in config:
        return int(config["seed"])
    env = os.environ.get("ARGTREE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"ARGTREE_SEED is not an integer: {env!r}") from None
    return 0


def _log(message: str) -> None:
    print(f"[argtree] {message}", file=sys.stderr)


def _log_effective_config(command: str, config: dict, seed: int, threads: int) -> None:
    parts = [f"{k}={config[k]}" for k in sorted(config) if k != "seed"]
    rendered = " ".join(parts) if parts else "(defaults)"
    _log(f"{command}: seed={seed} threads={threads} config: {rendered}")


def _atomic_write(path: str, writer: Callable[[IO[str]], None]) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".argtree-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            writer(handle)
        os.replace(tmp_path, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp_path)
        raise


def _read_corpus(path: str):
    return corpus_io.parse_corpus_file(path)


def _read_pairs_with_task(path: str) -> tuple[str, list]:
    examples = read_pairs_file(path)
    if not examples:
        raise ValueError(f"{path}: no examples")
    task = "specificity" if isinstance(examples[0], SpecificityExample) else "stance"
    return task, examples


def _detect_dataset_kind(path: str) -> str:
    """'features' for feature files, 'pairs' for derived-pair files."""
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            if not isinstance(record, dict):
                break
            if record.get("schema") == "argtree-features/1":
                return "features"
            if "task" in record and "label" in record:
                return "pairs"
            break
    raise ValueError(f"{path}: neither a derived-pairs file nor a features file")


def _train_config_from(config: dict, seed: int, neural: bool) -> TrainConfig:
    train_config = TrainConfig(seed=seed)
    if neural:
        train_config.learning_rate = 0.001
    for key in ("learning_rate", "l2", "batch_size", "max_epochs", "patience"):
        if key in config:
            setattr(train_config, key, config[key])
    train_config.validate()
    return train_config


def _encoder_config_from(config: dict) -> EncoderConfig:
    encoder_config = EncoderConfig()
    for key in (
        "dim",
        "hidden",
        "truncate",
        "pair_order",
        "share_encoder",
        "max_positions",
        "min_count",
    ):
        if key in config:
            setattr(encoder_config, key, config[key])
    encoder_config.validate()
    return encoder_config


def _synth_config_from(config: dict, seed: int) -> SynthConfig:
    synth_config = SynthConfig(seed=seed)
    for key, value in config.items():
        if key == "seed":
            continue
        if hasattr(synth_config, key):
            setattr(synth_config, key, value)
    synth_config.validate()
    return synth_config


# ---------------------------------------------------------------- subcommands


def cmd_validate(args: argparse.Namespace) -> int:
    trees = _read_corpus(args.file)
    total = 0
    for tree in trees:
        for violation in validate_tree(tree):
            print(f"{tree.topic_id}: {violation.node_id}: {violation.rule}")
            total += 1
    if total:
        print(f"{total} violation(s) in {len(trees)} tree(s)", file=sys.stderr)
        return 1
    _log(f"validate: {len(trees)} tree(s), no violations")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    trees = _read_corpus(args.file)
    if args.per_tree:
        for tree in trees:
            depth = max(node_depth(tree, node_id) for node_id in tree.nodes)
            pro = sum(
                1
                for node in tree.nodes.values()
                if node.stance_to_parent is not None and node.stance_to_parent.value == "pro"
            )
            con = sum(
                1
                for node in tree.nodes.values()
                if node.stance_to_parent is not None and node.stance_to_parent.value == "con"
            )
            print(
                f"{tree.topic_id}\tclaims={len(tree.nodes)}\tdepth={depth}\tpro={pro}\tcon={con}"
            )
    text = stats_mod.corpus_stats(trees).to_text()
    if args.out:
        _atomic_write(args.out, lambda handle: handle.write(text))
    else:
        print(text, end="")
    return 0


def cmd_import_outline(args: argparse.Namespace) -> int:
    tags = frozenset(t for t in (args.tags.split(",") if args.tags else []) if t)
    with open(args.file, encoding="utf-8") as handle:
        tree = corpus_io.import_outline(handle, topic_id=args.topic_id, tags=tags)
    _atomic_write(args.out, lambda handle: corpus_io.write_corpus([tree], handle))
    _log(f"import-outline: wrote 1 tree ({len(tree.nodes)} claims) to {args.out}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    seed = resolve_seed(args.seed, config)
    _log_effective_config("synth", config, seed, args.threads)
    synth_config = _synth_config_from(config, seed)
    trees, ledger = generate_corpus(synth_config)
    _atomic_write(args.out, lambda handle: corpus_io.write_corpus(trees, handle))
    if args.ledger:
        _atomic_write(args.ledger, ledger.write)
    _log(
        f"synth: {len(trees)} tree(s), {ledger.totals['nodes']} claims, "
        f"length-signal rate {ledger.length_signal_rate():.4f} -> {args.out}"
    )
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    seed = resolve_seed(args.seed, config)
    _log_effective_config("split", config, seed, args.threads)
    try:
        ratios = tuple(float(part) for part in args.ratios.split(","))
    except ValueError:
        raise UsageError(f"bad --ratios {args.ratios!r}") from None
    if len(ratios) != 3:
        raise UsageError("--ratios needs exactly three comma-separated numbers")
    trees = _read_corpus(args.corpus)
    split = split_by_topic([tree.topic_id for tree in trees], ratios=ratios, seed=seed)
    _atomic_write(args.out, lambda handle: write_split(split, handle))
    _log(
        f"split: {len(split.train)}/{len(split.dev)}/{len(split.test)} topics -> {args.out}"
    )
    return 0


def cmd_derive_pairs(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    seed = resolve_seed(args.seed, config)
    _log_effective_config("derive-pairs", config, seed, args.threads)
    if (args.split is None) != (args.part is None):
        raise UsageError("--split and --part must be given together")
    trees = _read_corpus(args.corpus)
    if args.split:
        split = read_split_file(args.split)
        keep = split.part(args.part)
        trees = [tree for tree in trees if tree.topic_id in keep]
    max_distance = args.max_distance or DEFAULT_MAX_DISTANCE[args.task]
    if args.task == "specificity":
        examples = list(derive_specificity_examples(trees, max_distance=max_distance, seed=seed))
    else:
        examples = list(derive_stance_examples(trees, max_distance=max_distance))
    _atomic_write(args.out, lambda handle: write_pairs(examples, handle))
    _log(f"derive-pairs: {len(examples)} {args.task} example(s) -> {args.out}")
    return 0


def cmd_featurize(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    seed = resolve_seed(args.seed, config)
    _log_effective_config("featurize", config, seed, args.threads)
    task, examples = _read_pairs_with_task(args.pairs)
    if task != args.task:
        raise ValueError(f"{args.pairs} holds {task} examples, but --task is {args.task}")
    if not examples:
        raise ValueError(f"{args.pairs}: no examples to featurize")
    if args.use_path and task != "stance":
        raise UsageError("--use-path applies to stance pairs only")
    if args.feature_set != "both" and task != "specificity":
        raise UsageError("--feature-set applies to specificity pairs only")

    if os.path.exists(args.vocab):
        vocab = read_vocabulary_file(args.vocab)
    else:
        min_count = int(config.get("min_count", 2))
        if task == "specificity":
            texts = [t for ex in examples for t in (ex.first_text, ex.second_text)]
        else:
            texts = [t for ex in examples for t in ex.path_texts]
        vocab = build_vocabulary(texts, min_count=min_count, built_from=args.pairs)
        _atomic_write(args.vocab, lambda handle: write_vocabulary(vocab, handle))
        _log(f"featurize: built vocabulary ({len(vocab)} tokens) -> {args.vocab}")

    lexicon = read_lexicon_file(args.lexicon) if args.lexicon else Lexicon()
    embeddings = read_embeddings_file(args.embeddings) if args.embeddings else None

    if task == "specificity":
        schema, records = featurize_specificity(
            examples, vocab, lexicon, feature_set=args.feature_set
        )
    else:
        schema, records = featurize_stance(
            examples, vocab, lexicon, embeddings=embeddings, use_path=args.use_path
        )
    _atomic_write(args.out, lambda handle: write_features(schema, records, handle))
    _log(f"featurize: {len(records)} record(s), width {schema.width} -> {args.out}")
    return 0


def _load_training_labels(path: str) -> list[str]:
    kind = _detect_dataset_kind(path)
    if kind == "features":
        _, records = read_features_file(path)
        return [record.label for record in records]
    return [example.label.value for example in read_pairs_file(path)]


def cmd_train(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    seed = resolve_seed(args.seed, config)
    _log_effective_config("train", config, seed, args.threads)
    model_kind = args.model

    if model_kind == "majority":
        labels = _load_training_labels(args.train)
        tie = config.get("tie_preference") or sorted(set(labels))[0]
        model: object = majority_fit(labels, tie_preference=tie, task=args.task)
    elif model_kind == "length":
        if args.task != "specificity":
            raise UsageError("the length baseline is a specificity model")
        model = LengthBaseline(task=args.task)
    elif model_kind == "logreg":
        if _detect_dataset_kind(args.train) != "features":
            raise ValueError("logreg trains on a features file; run `argtree featurize` first")
        schema, train_records = read_features_file(args.train)
        if schema.task != args.task:
            raise ValueError(f"{args.train} holds {schema.task} features, --task is {args.task}")
        dev_records = None
        if args.dev:
            dev_schema, dev_records = read_features_file(args.dev)
            if (dev_schema.sparse_names, dev_schema.dense_names) != (
                schema.sparse_names,
                schema.dense_names,
            ):
                raise ValueError("train and dev feature spaces differ")
        train_config = _train_config_from(config, seed, neural=False)
        model = train_logreg(schema, train_records, dev_records, train_config)
    else:
        if _detect_dataset_kind(args.train) != "pairs":
            raise ValueError(f"{model_kind} trains on a derived-pairs file")
        task, train_examples = _read_pairs_with_task(args.train)
        if task != args.task:
            raise ValueError(f"{args.train} holds {task} examples, --task is {args.task}")
        if task == "specificity" and model_kind != "pair":
            raise UsageError("path models need stance pairs (specificity pairs have no path)")
        dev_examples = None
        if args.dev:
            dev_task, dev_examples = _read_pairs_with_task(args.dev)
            if dev_task != task:
                raise ValueError("train and dev files hold different tasks")
        train_config = _train_config_from(config, seed, neural=True)
        encoder_config = _encoder_config_from(config)
        model = train_neural(
            model_kind,
            task,
            train_examples,
            dev_examples,
            encoder_config=encoder_config,
            train_config=train_config,
        )

    payload = model_payload(model)
    _atomic_write(args.out, lambda handle: dump_checkpoint(handle, *payload))
    history = getattr(model, "history", [])
    if history:
        last = history[-1]
        dev_note = "" if last.dev_accuracy is None else f", dev acc {last.dev_accuracy:.4f}"
        _log(
            f"train: {model_kind} epoch {last.epoch} loss {last.train_loss:.4f}{dev_note} "
            f"-> {args.out}"
        )
    else:
        _log(f"train: {model_kind} -> {args.out}")
    return 0


def _predict_items(model: object, test_path: str) -> tuple[str, str, list[EvalItem]]:
    """Run a loaded model over a test file; returns (task, kind, items)."""
    dataset_kind = _detect_dataset_kind(test_path)

    if isinstance(model, LogisticRegressionModel):
        if dataset_kind != "features":
            raise ValueError("logreg evaluation needs a features file")
        schema, records = read_features_file(test_path)
        if (schema.sparse_names, schema.dense_names) != (
            model.sparse_names,
            model.dense_names,
        ):
            raise ValueError("feature file does not match the model's feature space")
        predicted = model.predict_labels(records)
        items = [
            EvalItem(
                topic_id=record.topic_id,
                distance=record.distance,
                same_stance=record.same_stance,
                gold=record.label,
                predicted=pred,
            )
            for record, pred in zip(records, predicted)
        ]
        return model.task, "logreg", items

    if isinstance(model, MajorityBaseline):
        if dataset_kind == "features":
            _, records = read_features_file(test_path)
            triples = [(r.topic_id, r.distance, r.same_stance, r.label) for r in records]
        else:
            _, examples = _read_pairs_with_task(test_path)
            triples = [
                (e.topic_id, e.distance, e.same_stance, e.label.value) for e in examples
            ]
        items = [
            EvalItem(
                topic_id=topic,
                distance=distance,
                same_stance=same_stance,
                gold=gold,
                predicted=model.predict_label(),
            )
            for topic, distance, same_stance, gold in triples
        ]
        return model.task, "majority", items

    if isinstance(model, LengthBaseline):
        if dataset_kind != "pairs":
            raise ValueError("the length baseline needs a derived-pairs file (it reads texts)")
        task, examples = _read_pairs_with_task(test_path)
        if task != "specificity":
            raise ValueError("the length baseline scores specificity pairs only")
        items = [
            EvalItem(
                topic_id=e.topic_id,
                distance=e.distance,
                same_stance=e.same_stance,
                gold=e.label.value,
                predicted=length_predict(e.first_text, e.second_text).value,
            )
            for e in examples
        ]
        return task, "length", items

    if isinstance(model, NeuralModel):
        if dataset_kind != "pairs":
            raise ValueError("neural evaluation needs a derived-pairs file (it reads texts)")
        task, examples = _read_pairs_with_task(test_path)
        if task != model.task:
            raise ValueError(f"{test_path} holds {task} examples, model is for {model.task}")
        predicted = model.predict_labels(examples)
        items = [
            EvalItem(
                topic_id=e.topic_id,
                distance=e.distance,
                same_stance=e.same_stance,
                gold=e.label.value,
                predicted=pred,
            )
            for e, pred in zip(examples, predicted)
        ]
        return task, model.kind, items

    raise ValueError(f"cannot evaluate model of type {type(model).__name__}")


_STRATA_CSV_FIELDS = ["task", "model", "split", "stratum", "count", "correct", "accuracy"]


def _filter_strata(report: EvalReport, requested: Optional[list[str]]) -> EvalReport:
    if requested is None:
        return report
    strata = {name: report.strata.get(name, Stratum(0, 0)) for name in requested}
    return EvalReport(
        task=report.task,
        model=report.model,
        split=report.split,
        strata=strata,
        per_topic=report.per_topic,
    )


def _parse_strata_flag(raw: Optional[str]) -> Optional[list[str]]:
    if raw is None:
        return None
    names = [name.strip() for name in raw.split(",") if name.strip()]
    if not names:
        raise UsageError("--strata is empty")
    for name in names:
        if name == "all" or name == "same-stance":
            continue
        if name.startswith("d") and name[1:].isdigit() and int(name[1:]) >= 1:
            continue
        raise UsageError(f"unknown stratum {name!r} (expected all, dN or same-stance)")
    return names


def cmd_evaluate(args: argparse.Namespace) -> int:
    requested = _parse_strata_flag(args.strata)
    model = load_model(args.model)
    task, kind, items = _predict_items(model, args.test)
    name = args.name or kind
    report = stratified_eval(items, task=task, model=name, split=args.split_name)
    filtered = _filter_strata(report, requested)

    def writer(handle: IO[str]) -> None:
        writer_obj = csv.DictWriter(handle, fieldnames=_STRATA_CSV_FIELDS, lineterminator="\n")
        writer_obj.writeheader()
        for row in report_csv_rows(filtered):
            writer_obj.writerow(row)

    _atomic_write(args.out, writer)
    if args.json:
        _atomic_write(args.json, lambda handle: dump_report(report, handle))
    print(report_to_text(filtered), end="")
    _log(f"evaluate: {len(items)} example(s) -> {args.out}")
    return 0


def _reports_from_csv_files(paths: Sequence[str]) -> list[EvalReport]:
    reports: dict[str, EvalReport] = {}
    order: list[str] = []
    for path in paths:
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or set(_STRATA_CSV_FIELDS) - set(reader.fieldnames):
                raise ValueError(f"{path}: not an evaluation CSV (missing columns)")
            for row in reader:
                model = row["model"]
                if model not in reports:
                    reports[model] = EvalReport(
                        task=row["task"], model=model, split=row["split"], strata={}
                    )
                    order.append(model)
                reports[model].strata[row["stratum"]] = Stratum(
                    count=int(row["count"]), correct=int(row["correct"])
                )
    if not order:
        raise ValueError("no evaluation rows found")
    return [reports[model] for model in order]


def cmd_report(args: argparse.Namespace) -> int:
    reports = _reports_from_csv_files(args.files)
    header, rows = merge_reports_wide(reports)

    def writer(handle: IO[str]) -> None:
        writer_obj = csv.writer(handle, lineterminator="\n")
        writer_obj.writerow(header)
        writer_obj.writerows(rows)

    _atomic_write(args.out, writer)
    print(wide_table_text(header, rows), end="")
    _log(f"report: merged {len(reports)} model(s) -> {args.out}")
    return 0


def cmd_significance(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    alpha = args.alpha if args.alpha is not None else float(config.get("alpha", 0.05))
    if not 0.0 < alpha < 1.0:
        raise UsageError("--alpha must lie strictly between 0 and 1")
    model_a = load_model(args.model_a)
    model_b = load_model(args.model_b)
    task_a, kind_a, items_a = _predict_items(model_a, args.test)
    task_b, kind_b, items_b = _predict_items(model_b, args.test)
    if task_a != task_b:
        raise ValueError(f"models solve different tasks: {task_a} vs {task_b}")
    report_a = stratified_eval(items_a, task=task_a, model=kind_a)
    report_b = stratified_eval(items_b, task=task_b, model=kind_b)
    topics, accs_a, accs_b = paired_topic_vectors(report_a, report_b)
    result = paired_t_test(accs_a, accs_b)

    print(f"model-a: {kind_a}  accuracy {report_a.accuracy_of('all'):.4f}")
    print(f"model-b: {kind_b}  accuracy {report_b.accuracy_of('all'):.4f}")
    print(f"topics: {len(topics)}")
    if result.degenerate:
        print(f"t: degenerate (zero-variance differences), mean diff {result.mean_diff:+.4f}")
    else:
        print(f"t: {result.t:.4f}  df: {result.df}  p: {result.p:.6f}")
    verdict = "yes" if (not result.degenerate and result.p < alpha) else "no"
    print(f"significant at alpha={alpha:g}: {verdict}")
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    kinds = [args.model] if args.model else ["logreg", "pair", "path-flat", "path-hier"]
    failures = 0
    for kind in kinds:
        if kind == "logreg":
            result = gradcheck_logreg(seed=args.seed or 0)
            tolerance = LOGREG_TOLERANCE
        else:
            result = gradcheck_neural(kind, seed=args.seed or 0)
            tolerance = NEURAL_TOLERANCE
        ok = result.max_rel_error < tolerance
        status = "ok" if ok else "FAIL"
        print(
            f"{kind}: max rel error {result.max_rel_error:.3e} "
            f"(tolerance {tolerance:.0e}, {result.parameter_count} params, "
            f"worst {result.worst_block}) {status}"
        )
        if not ok:
            failures += 1
    return 1 if failures else 0


# -------------------------------------------------------------------- parser


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="argtree",
        description="Argument-tree corpora, derived claim-pair tasks, and models over them.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed (overrides config/env)")
    common.add_argument("--config", default=None, help="flat key = value config file")
    common.add_argument(
        "--threads", type=int, default=1, help="worker threads (accepted; execution is serial)"
    )
    subparsers = parser.add_subparsers(dest="command", metavar="<command>")
    registry: dict[str, argparse.ArgumentParser] = {}

    def sub(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = subparsers.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        registry[name] = p
        return p

    p = sub("validate", cmd_validate, "check a corpus file against the tree rules")
    p.add_argument("file", help="corpus file (one tree per line)")

    p = sub("stats", cmd_stats, "corpus-level statistics")
    p.add_argument("file", help="corpus file")
    p.add_argument("--per-tree", action="store_true", help="also print one line per tree")
    p.add_argument("-o", "--out", default=None, help="write the summary here instead of stdout")

    p = sub("import-outline", cmd_import_outline, "convert an outline to a one-tree corpus")
    p.add_argument("file", help="outline text file")
    p.add_argument("--topic-id", required=True, help="topic id for the imported tree")
    p.add_argument("--tags", default="", help="comma-separated tags")
    p.add_argument("-o", "--out", required=True, help="output corpus file")

    p = sub("synth", cmd_synth, "generate a seeded synthetic corpus with planted signals")
    p.add_argument("-o", "--out", required=True, help="output corpus file")
    p.add_argument("--ledger", default=None, help="also write the generation ledger here")

    p = sub("split", cmd_split, "topic-disjoint train/dev/test split")
    p.add_argument("corpus", help="corpus file")
    p.add_argument("--ratios", default="0.6,0.2,0.2", help="train,dev,test fractions")
    p.add_argument("-o", "--out", required=True, help="output split file")

    p = sub("derive-pairs", cmd_derive_pairs, "derive labeled claim-pair examples")
    p.add_argument("corpus", help="corpus file")
    p.add_argument("--task", required=True, choices=["specificity", "stance"])
    p.add_argument(
        "--max-distance",
        type=int,
        default=None,
        help="pair distance cap (default: 5 for specificity, 4 for stance)",
    )
    p.add_argument("--split", default=None, help="split file to filter topics with")
    p.add_argument("--part", default=None, choices=["train", "dev", "test"])
    p.add_argument("-o", "--out", required=True, help="output pairs file")

    p = sub("featurize", cmd_featurize, "turn pairs into feature records")
    p.add_argument("pairs", help="derived-pairs file")
    p.add_argument("--task", required=True, choices=["specificity", "stance"])
    p.add_argument(
        "--vocab", required=True, help="vocabulary file (built from the pairs if missing)"
    )
    p.add_argument("--lexicon", default=None, help="polarity lexicon (token TAB pol TAB strength)")
    p.add_argument("--embeddings", default=None, help="token embedding table")
    p.add_argument(
        "--use-path", action="store_true", help="stance: featurize the concatenated path"
    )
    p.add_argument(
        "--feature-set",
        default="both",
        choices=["bow", "surface", "both"],
        help="specificity feature blocks",
    )
    p.add_argument("-o", "--out", required=True, help="output features file")

    p = sub("train", cmd_train, "fit a model and write a checkpoint")
    p.add_argument(
        "--model",
        required=True,
        choices=["majority", "length", "logreg", "pair", "path-flat", "path-hier"],
    )
    p.add_argument("--task", required=True, choices=["specificity", "stance"])
    p.add_argument("--train", required=True, help="training data (pairs or features)")
    p.add_argument("--dev", default=None, help="development data for early stopping")
    p.add_argument("-o", "--out", required=True, help="output checkpoint")

    p = sub("evaluate", cmd_evaluate, "score a checkpoint on a test file")
    p.add_argument("--model", required=True, help="model checkpoint")
    p.add_argument("--test", required=True, help="test data (pairs or features)")
    p.add_argument(
        "--strata", default=None, help="comma list, e.g. all,d1,d2,d3,d4,same-stance"
    )
    p.add_argument("--name", default=None, help="row label for reports (default: model kind)")
    p.add_argument("--split-name", default="test", help="split label recorded in the report")
    p.add_argument("--json", default=None, help="also write the full report as JSON here")
    p.add_argument("-o", "--out", required=True, help="output CSV (one row per stratum)")

    p = sub("significance", cmd_significance, "paired t-test between two checkpoints")
    p.add_argument("--model-a", required=True, help="first checkpoint")
    p.add_argument("--model-b", required=True, help="second checkpoint")
    p.add_argument("--test", required=True, help="shared test data")
    p.add_argument("--alpha", type=float, default=None, help="significance level (default 0.05)")

    p = sub("gradcheck", cmd_gradcheck, "verify analytic gradients on tiny fixtures")
    p.add_argument(
        "--model",
        default=None,
        choices=["logreg", "pair", "path-flat", "path-hier"],
        help="check one model kind (default: all four)",
    )

    p = sub("report", cmd_report, "merge evaluation CSVs into one wide table")
    p.add_argument("files", nargs="+", help="evaluation CSVs from `argtree evaluate`")
    p.add_argument("-o", "--out", required=True, help="output wide CSV")

    return parser, registry


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser, registry = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        print("error: a subcommand is required", file=sys.stderr)
        return 2
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        registry[args.command].print_usage(sys.stderr)
        return 2
    except FileNotFoundError as exc:
        missing = exc.filename if exc.filename else str(exc)
        print(f"error: file not found: {missing}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
