"""Command-line front end: ingest, train, predict, score, rank, report, label.

Configuration resolves in four layers, weakest first: built-in defaults,
the --config JSON file, VULNRANK_* environment variables, then explicit
flags. Every flag mirrors a config key of the same name.

Exit codes are a stable scripting contract: 0 success, 2 ingest or
validation failure, 3 training failure, 4 model compatibility failure,
5 scoring completeness failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from pathlib import Path

from vulnrank.cvss import CvssError
from vulnrank.feeds import (
    Criticality,
    Exposure,
    FeedError,
    LabeledExample,
    Labeler,
    attach_descriptions,
    load_asset_context,
    load_cve_records,
    load_exploit_refs,
    load_labels,
    merge_labels,
    save_labels,
)
from vulnrank.report import DEFAULT_TIER_BOUNDS, ExportFormat, IoError, compare, export, rank
from vulnrank.scoring import (
    DEFAULT_ENV_WEIGHTS,
    EnvWeights,
    InvalidConfig,
    MissingCvss,
    MissingLabels,
    TriageLabels,
    score_portfolio,
)
from vulnrank.triage.features import fit_vocabulary
from vulnrank.triage.metrics import evaluate
from vulnrank.triage.modelio import ModelVersionError, load_model, save_model
from vulnrank.triage.svm import (
    CorpusTooSmall,
    DegenerateTaskWarning,
    Task,
    TrainConfig,
    predict_text,
    split,
    train,
)
from vulnrank.wx import count_wx

EXIT_OK = 0
EXIT_INGEST = 2
EXIT_TRAIN = 3
EXIT_MODEL = 4
EXIT_SCORING = 5

ENV_PREFIX = "VULNRANK_"


@dataclass(frozen=True)
class RunConfig:
    """All knobs for a run; field names double as config keys and flags."""

    cves: str | None = None
    refs: str | None = None
    context: str | None = None
    labels: str | None = None
    model_utility: str = "utility_model.json"
    model_opportune: str = "opportune_model.json"
    output: str | None = None
    format: str | None = None
    seed: int = 42
    min_df: int = 2
    epochs: int = 20
    reg_lambda: float = 1e-4
    stratified: bool = False
    env_weights: EnvWeights = DEFAULT_ENV_WEIGHTS
    tier_bounds: tuple[Decimal, ...] = DEFAULT_TIER_BOUNDS

    def model_path(self, task: Task) -> str:
        return self.model_utility if task is Task.UTILITY else self.model_opportune


_SCALAR_CASTS = {
    "seed": int,
    "min_df": int,
    "epochs": int,
    "reg_lambda": float,
}


def _parse_bool(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "on")


def _parse_tier_bounds(raw) -> tuple[Decimal, ...]:
    # Accepts a JSON list or a comma-separated string ("64,32,16,8").
    values = raw.split(",") if isinstance(raw, str) else raw
    try:
        return tuple(Decimal(str(v).strip()) for v in values)
    except InvalidOperation as exc:
        raise InvalidConfig(f"bad tier_bounds {raw!r}: {exc}") from None


def _parse_env_weights(section: dict) -> EnvWeights:
    try:
        exposure = {
            Exposure(name): Decimal(str(value))
            for name, value in section.get("exposure", {}).items()
        }
        criticality = {
            Criticality(name): Decimal(str(value))
            for name, value in section.get("criticality", {}).items()
        }
    except (ValueError, InvalidOperation) as exc:
        raise InvalidConfig(f"bad env_weights section: {exc}") from None
    return EnvWeights(
        exposure=exposure or DEFAULT_ENV_WEIGHTS.exposure,
        criticality=criticality or DEFAULT_ENV_WEIGHTS.criticality,
    )


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then config file, then environment, then flags."""
    config = RunConfig()

    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise FeedError(f"config file not found: {path}")
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        updates = {}
        for key, value in doc.items():
            if key == "env_weights":
                updates[key] = _parse_env_weights(value)
            elif key == "tier_bounds":
                updates[key] = _parse_tier_bounds(value)
            elif key in {f.name for f in fields(RunConfig)}:
                updates[key] = value
            else:
                raise FeedError(f"{path}: unknown config key {key!r}")
        config = replace(config, **updates)

    for f in fields(RunConfig):
        if f.name == "env_weights":
            continue
        raw = os.environ.get(ENV_PREFIX + f.name.upper())
        if raw is None:
            continue
        if f.name == "stratified":
            config = replace(config, stratified=_parse_bool(raw))
        elif f.name == "tier_bounds":
            config = replace(config, tier_bounds=_parse_tier_bounds(raw))
        else:
            cast = _SCALAR_CASTS.get(f.name, str)
            config = replace(config, **{f.name: cast(raw)})

    flag_updates = {}
    for f in fields(RunConfig):
        if f.name == "env_weights":
            continue
        value = getattr(args, f.name, None)
        if value is None:
            continue
        if f.name == "tier_bounds":
            value = _parse_tier_bounds(value)
        flag_updates[f.name] = value
    return replace(config, **flag_updates)


def _require_paths(config: RunConfig, names: list[str]) -> None:
    for name in names:
        value = getattr(config, name)
        if value is None:
            raise FeedError(f"no {name} path configured (flag --{name.replace('_', '-')})")
        if not Path(value).exists():
            raise FeedError(f"{name} file not found: {value}")


def _optional_paths(config: RunConfig, names: list[str]) -> None:
    for name in names:
        value = getattr(config, name)
        if value is not None and not Path(value).exists():
            raise FeedError(f"{name} file not found: {value}")


def _effective_labels(config: RunConfig) -> dict[str, LabeledExample]:
    path = Path(config.labels)
    return merge_labels(load_labels(path)) if path.exists() else {}


def _emit(config: RunConfig, data: bytes) -> None:
    if config.output is None:
        sys.stdout.flush()
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        try:
            with open(config.output, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            raise IoError(f"cannot write {config.output}: {exc}") from exc


def cmd_ingest(config: RunConfig) -> int:
    _require_paths(config, ["cves"])
    _optional_paths(config, ["refs", "context", "labels"])
    records = load_cve_records(config.cves)
    ref_count = 0
    if config.refs is not None:
        ref_count = sum(len(group) for group in load_exploit_refs(config.refs).values())
    label_count = 0
    if config.labels is not None and Path(config.labels).exists():
        label_count = len(load_labels(config.labels))
    ctx_count = 0
    if config.context is not None:
        ctx_count = len(load_asset_context(config.context))
    print(
        f"{len(records)} CVEs, {ref_count} references, "
        f"{label_count} labels, {ctx_count} context entries"
    )
    return EXIT_OK


def cmd_train(config: RunConfig, task: Task) -> int:
    _require_paths(config, ["cves", "labels"])
    records = load_cve_records(config.cves)
    merged = _effective_labels(config)
    examples = [merged[cve_id] for cve_id in sorted(merged)]
    if len(examples) < 5:
        raise CorpusTooSmall(f"label store holds {len(examples)} examples; need at least 5")
    examples = attach_descriptions(examples, records)

    stratify = (lambda ex: task.label_of(ex)) if config.stratified else None
    train_set, test_set = split(examples, 0.8, seed=config.seed, stratify_key=stratify)
    vocab = fit_vocabulary([ex.description for ex in train_set], min_df=config.min_df)
    train_config = TrainConfig(epochs=config.epochs, reg_lambda=config.reg_lambda, seed=config.seed)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateTaskWarning)
        model = train(task, train_set, vocab, train_config)
    for warning in caught:
        print(f"warning: {warning.message}", file=sys.stderr)

    report = evaluate(model, test_set)
    save_model(config.model_path(task), model)
    print(f"task: {task.value}")
    print(f"train/test: {len(train_set)}/{len(test_set)}, vocabulary: {vocab.size}")
    for line in report.lines():
        print(line)
    print(f"model written to {config.model_path(task)}")
    return EXIT_OK


def _deterministic_ts(merged: dict[str, LabeledExample]) -> datetime:
    # Reruns on identical inputs must produce identical label files, so
    # model labels are stamped with the newest timestamp already in the
    # store rather than the wall clock.
    if not merged:
        return datetime(1970, 1, 1, tzinfo=timezone.utc)
    return max(ex.labeled_at for ex in merged.values())


def cmd_predict(config: RunConfig, task: Task) -> int:
    _require_paths(config, ["cves"])
    if config.labels is None:
        raise FeedError("no labels path configured (flag --labels)")
    model = load_model(config.model_path(task))
    if model.task is not task:
        raise ModelVersionError(
            f"{config.model_path(task)} holds a {model.task.value} model, not {task.value}"
        )
    records = load_cve_records(config.cves)
    merged = _effective_labels(config)

    targets = [
        rec
        for rec in records
        if rec.cve_id not in merged or merged[rec.cve_id].labeler is not Labeler.SME
    ]
    if not targets:
        print("all CVEs already carry SME labels; nothing to predict")
        return EXIT_OK

    stamp = _deterministic_ts(merged)
    fresh = []
    for rec in targets:
        predicted = predict_text(model, rec.description)
        existing = merged.get(rec.cve_id)
        utility = existing.utility if existing is not None else 0
        opportune = existing.opportune if existing is not None else 0
        if task is Task.UTILITY:
            utility = predicted
        else:
            opportune = predicted
        fresh.append(
            LabeledExample(
                cve_id=rec.cve_id,
                utility=utility,
                opportune=opportune,
                labeler=Labeler.MODEL,
                labeled_at=stamp,
            )
        )
    save_labels(config.labels, fresh)
    print(f"predicted {task.value} for {len(fresh)} CVEs -> {config.labels}")
    return EXIT_OK


def _scored_portfolio(config: RunConfig):
    _require_paths(config, ["cves", "labels"])
    _optional_paths(config, ["refs", "context"])
    records = load_cve_records(config.cves)
    merged = _effective_labels(config)
    labels_map = {
        cve_id: TriageLabels(ex.utility, ex.opportune, ex.labeler)
        for cve_id, ex in merged.items()
    }
    wx_map = {}
    if config.refs is not None:
        wx_map = count_wx(load_exploit_refs(config.refs))
    ctx_map = {}
    if config.context is not None:
        ctx_map = load_asset_context(config.context)
    return score_portfolio(records, wx_map, labels_map, ctx_map, config.env_weights)


def cmd_score(config: RunConfig) -> int:
    fmt = ExportFormat.parse(config.format or "json-lines")
    _emit(config, export(rank(_scored_portfolio(config)), fmt))
    return EXIT_OK


def cmd_rank(config: RunConfig) -> int:
    fmt = ExportFormat.parse(config.format or "text")
    _emit(config, export(rank(_scored_portfolio(config)), fmt))
    return EXIT_OK


def cmd_report(config: RunConfig) -> int:
    fmt = ExportFormat.parse(config.format or "text")
    report = compare(_scored_portfolio(config), tier_bounds=config.tier_bounds)
    _emit(config, export(report, fmt))
    return EXIT_OK


def _prompt(question: str, legal: set[str]) -> str:
    while True:
        try:
            answer = input(question).strip().lower()
        except EOFError:
            return "q"
        if answer in legal:
            return answer
        print(f"  enter one of: {', '.join(sorted(legal))}")


def cmd_label(config: RunConfig, timestamp: str | None) -> int:
    _require_paths(config, ["cves"])
    if config.labels is None:
        raise FeedError("no labels path configured (flag --labels)")
    records = load_cve_records(config.cves)
    merged = _effective_labels(config)
    targets = [
        rec
        for rec in sorted(records, key=lambda r: r.cve_id)
        if rec.cve_id not in merged or merged[rec.cve_id].labeler is not Labeler.SME
    ]
    if not targets:
        print("all CVEs already carry SME labels")
        return EXIT_OK

    if timestamp is not None:
        stamp = datetime.fromisoformat(timestamp.replace("Z", "+00:00"))
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
    else:
        stamp = datetime.now(timezone.utc)

    collected = []
    for rec in targets:
        print(f"\n{rec.cve_id}: {rec.description}")
        utility = _prompt("utility [0/1/2, s=skip, q=quit]: ", {"0", "1", "2", "s", "q"})
        if utility == "q":
            break
        if utility == "s":
            continue
        opportune = _prompt("opportune [0/1, s=skip, q=quit]: ", {"0", "1", "s", "q"})
        if opportune == "q":
            break
        if opportune == "s":
            continue
        collected.append(
            LabeledExample(
                cve_id=rec.cve_id,
                utility=int(utility),
                opportune=int(opportune),
                labeler=Labeler.SME,
                labeled_at=stamp,
            )
        )
    if collected:
        save_labels(config.labels, collected)
    print(f"\nsaved {len(collected)} label(s) to {config.labels}")
    return EXIT_OK


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--cves", help="CVE feed path")
    common.add_argument("--refs", help="exploit reference feed path")
    common.add_argument("--context", help="asset context feed path")
    common.add_argument("--labels", help="label store path")
    common.add_argument("--model-utility", dest="model_utility", help="utility model file")
    common.add_argument("--model-opportune", dest="model_opportune", help="opportune model file")
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, help="RNG seed (default 42)")
    common.add_argument("--min-df", dest="min_df", type=int, help="vocabulary min document frequency")
    common.add_argument("--epochs", type=int, help="training epochs")
    common.add_argument("--reg-lambda", dest="reg_lambda", type=float, help="L2 regularization")
    common.add_argument(
        "--stratified",
        action="store_const",
        const=True,
        default=None,
        help="stratify the train/test split by task label",
    )
    common.add_argument(
        "--tier-bounds",
        dest="tier_bounds",
        help="comma-separated threat tier boundaries, descending (default 64,32,16,8)",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vulnrank",
        description="Threat-score vulnerability prioritization pipeline.",
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", parents=[common], help="validate feeds and print counts")

    for name, help_text in (
        ("train", "train a triage model and report held-out F-scores"),
        ("predict", "fill missing labels with model predictions"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--task", required=True, choices=[t.value for t in Task])

    for name, default_fmt, help_text in (
        ("score", "json-lines", "score and emit the ranked portfolio"),
        ("rank", "text", "emit the ranked remediation queue"),
        ("report", "text", "emit the CVSS-versus-threat comparison report"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument(
            "--format",
            choices=["text", "csv", "json-lines"],
            help=f"output format (default {default_fmt})",
        )

    label = sub.add_parser("label", parents=[common], help="interactive SME labeling loop")
    label.add_argument("--timestamp", help="ISO-8601 stamp for saved labels (default: now)")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = build_config(args)
        if args.command == "ingest":
            return cmd_ingest(config)
        if args.command == "train":
            return cmd_train(config, Task(args.task))
        if args.command == "predict":
            return cmd_predict(config, Task(args.task))
        if args.command == "score":
            return cmd_score(config)
        if args.command == "rank":
            return cmd_rank(config)
        if args.command == "report":
            return cmd_report(config)
        if args.command == "label":
            return cmd_label(config, args.timestamp)
        raise AssertionError(args.command)
    except (MissingLabels, MissingCvss) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCORING
    except ModelVersionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except CorpusTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRAIN
    except (FeedError, CvssError, InvalidConfig, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
