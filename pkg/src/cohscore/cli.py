"""Command-line entry point for the batch scoring pipeline.

Stages are file based: essays.jsonl -> windows.jsonl / samples.jsonl ->
features.csv -> model.json -> predictions.csv -> report.json. Exit codes:
0 success, 1 input or validation error, 2 internal failure. Diagnostics go
to stderr; summaries meant for scripting go to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import gbrt, punct, sampling, scorer
from .corpus import CorpusError, read_essays


class InputError(Exception):
    """User-correctable problem: bad flag value, malformed or missing file."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract reserves 2 for internal
    # failures, so route usage errors through exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_essays(path: str):
    try:
        return read_essays(path)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except CorpusError as exc:
        raise InputError(str(exc)) from exc


def cmd_segment(args) -> int:
    essays = _load_essays(args.infile)
    windows = []
    for essay in essays:
        windows.extend(sampling.essay_windows(essay, args.window))
    sampling.write_windows(args.out, windows)
    print(f"essays={len(essays)} windows={len(windows)}")
    return 0


def cmd_gen_samples(args) -> int:
    essays = _load_essays(args.infile)
    samples = sampling.gen_dataset(essays, args.window, args.seed)
    sampling.write_samples(args.out, samples)
    positives = sum(1 for s in samples if s.label == sampling.COHERENT)
    negatives = len(samples) - positives
    if not samples:
        print("warning: no essay long enough for a full window, empty dataset", file=sys.stderr)
    print(f"positives={positives} negatives={negatives}")
    return 0


def cmd_featurize(args) -> int:
    essays = _load_essays(args.essays)
    try:
        records = punct.read_punct_labels(args.punct)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {args.punct}: {exc.strerror}") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    preds = None
    if args.coh is not None:
        try:
            preds = sampling.read_coh_preds(args.coh)
        except FileNotFoundError as exc:
            raise InputError(f"cannot read {args.coh}: {exc.strerror}") from exc
        except ValueError as exc:
            raise InputError(str(exc)) from exc

    rows = []
    counts_by_id = {}
    for essay in essays:
        record = records.get(essay.id)
        if record is None:
            raise InputError(f"essay {essay.id!r} has no punctuation labels")
        probs = None
        if preds is not None and essay.id in preds:
            per_window = preds[essay.id]
            probs = [per_window[w] for w in sorted(per_window)]
        elif essay.sentences():
            # Essays absent from the predictions file fall back to the
            # heuristic only when explicitly allowed.
            if not args.heuristic:
                raise InputError(f"essay {essay.id!r} has no coherence predictions")
        try:
            rows.append(
                scorer.essay_feature_row(
                    essay, record, probs=probs, k=args.window, threshold=args.threshold
                )
            )
            if args.counts_out:
                reference = punct.resolve_reference(essay.text(), record)
                counts_by_id[essay.id] = punct.count_essay(essay.text(), reference)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    scorer.write_features_csv(args.out, rows)
    if args.counts_out:
        punct.write_counts_csv(args.counts_out, counts_by_id)
    print(f"essays={len(rows)}")
    return 0


def cmd_train(args) -> int:
    if args.model == "rf" and args.seed is None:
        raise InputError("--seed is required for --model rf")
    try:
        config = gbrt.TrainConfig(
            n_rounds=args.rounds, max_depth=args.depth, learning_rate=args.lr
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    try:
        report = scorer.train_pipeline(
            args.features,
            args.out,
            args.model,
            config,
            monotone=args.monotone == "on",
            n_trees=args.trees,
            seed=args.seed if args.seed is not None else 0,
        )
    except (FileNotFoundError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    print(f"kind={report.kind} rmse={report.rmse:.6f}")
    return 0


def cmd_predict(args) -> int:
    try:
        predictions = scorer.predict_pipeline(args.features, args.model, args.out)
    except (FileNotFoundError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    print(f"predictions={len(predictions)}")
    return 0


def cmd_evaluate(args) -> int:
    try:
        predictions = scorer.read_predictions_csv(args.pred)
        gold_rows = scorer.read_features_csv(args.gold)
    except (FileNotFoundError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    gold_by_id = {r.essay_id: r.level for r in gold_rows}
    missing = [p.essay_id for p in predictions if gold_by_id.get(p.essay_id) is None]
    if missing:
        raise InputError(f"no gold level for: {', '.join(missing[:5])}")
    if len(predictions) != len(gold_rows):
        raise InputError(
            f"{len(predictions)} predictions for {len(gold_rows)} gold rows"
        )
    try:
        report = scorer.evaluate(
            [p.level for p in predictions],
            [gold_by_id[p.essay_id] for p in predictions],
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    payload = {"metrics": report.to_dict()}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    print(
        f"macro_precision={report.macro_precision:.4f} "
        f"macro_recall={report.macro_recall:.4f} macro_f1={report.macro_f1:.4f}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cohscore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="emit sentence windows for every essay")
    p.add_argument("--in", dest="infile", required=True, help="essays.jsonl")
    p.add_argument("--out", required=True, help="windows.jsonl to write")
    p.add_argument("--window", type=int, choices=(2, 3), required=True)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("gen-samples", help="balanced coherent/incoherent training samples")
    p.add_argument("--in", dest="infile", required=True, help="essays.jsonl")
    p.add_argument("--out", required=True, help="samples.jsonl to write")
    p.add_argument("--window", type=int, choices=(2, 3), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_gen_samples)

    p = sub.add_parser("featurize", help="one feature row per essay")
    p.add_argument("--essays", required=True, help="essays.jsonl")
    p.add_argument("--coh", help="coh_preds.jsonl with window probabilities")
    p.add_argument(
        "--heuristic",
        action="store_true",
        help="score windows with the bigram heuristic when predictions are missing",
    )
    p.add_argument("--punct", required=True, help="punct_labels.jsonl reference labels")
    p.add_argument("--out", required=True, help="features.csv to write")
    p.add_argument("--counts-out", help="also write per-essay punct_counts.csv")
    p.add_argument("--threshold", type=float, default=0.5, help="coherent-window cutoff")
    p.add_argument(
        "--window", type=int, choices=(2, 3), default=3, help="window size for the heuristic"
    )
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="fit a scoring model on features.csv")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True, help="model.json to write")
    p.add_argument("--model", choices=("gbrt", "rf", "linear"), default="gbrt")
    p.add_argument("--monotone", choices=("on", "off"), default="on")
    p.add_argument("--rounds", type=int, default=30, help="boosting rounds")
    p.add_argument("--depth", type=int, default=4, help="maximum tree depth")
    p.add_argument("--lr", type=float, default=1.0, help="learning rate")
    p.add_argument("--trees", type=int, default=30, help="random forest size")
    p.add_argument("--seed", type=int, help="bootstrap seed (required for rf)")
    p.add_argument("--report", help="training report JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score feature rows with a saved model")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True, help="model.json")
    p.add_argument("--out", required=True, help="predictions.csv to write")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="compare predictions against gold levels")
    p.add_argument("--pred", required=True, help="predictions.csv")
    p.add_argument("--gold", required=True, help="features.csv carrying gold levels")
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception as exc:  # noqa: BLE001 - map unexpected failures to exit 2
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
