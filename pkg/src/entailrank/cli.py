"""Command-line front door: gen, score, tune, predict, ensemble, eval, report.

Experiments are file-mediated: scorers write run files, selection writes
prediction files, and evaluation reads both back. A TOML config can seed
any flag; explicit flags win. Exit codes: 0 ok, 2 usage, 3 data error,
4 transport error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from entailrank import corpus, ensemble, metrics, ranking, selection
from entailrank.errors import DataError, TransportError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_TRANSPORT = 4


def _load_config(path: str | None, section: str) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        config = tomllib.load(fh)
    merged = dict(config.get(section, {}))
    merged["_grid"] = config.get("grid", {})
    return merged


def _get(args, config: dict, key: str, default):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _parse_params(text: str) -> selection.SelectionParams:
    parts = text.split(",")
    if len(parts) != 3:
        raise DataError(f"params must be 'alpha,beta,gamma', got {text!r}")
    return selection.SelectionParams(float(parts[0]), int(parts[1]), float(parts[2]))


def _resolve_params(args, config: dict) -> selection.SelectionParams:
    params_file = _get(args, config, "params-file", None)
    if params_file:
        with open(params_file, encoding="utf-8") as fh:
            raw = json.load(fh)
        return selection.SelectionParams(float(raw["alpha"]), int(raw["beta"]), float(raw["gamma"]))
    params = _get(args, config, "params", None)
    if params is None:
        raise DataError("selection params required (--params or --params-file)")
    return _parse_params(params)


def _load_data(args, config: dict) -> corpus.Dataset:
    data_dir = _get(args, config, "data", None)
    if data_dir is None:
        raise DataError("dataset directory required (--data)")
    split = _get(args, config, "split", None)
    if split is None:
        split = "train" if (Path(data_dir) / corpus.LABELS_FILE).exists() else "test"
    return corpus.load_dataset(data_dir, split)


def _grid_from_config(config: dict) -> selection.GridSpec:
    grid_cfg = config.get("_grid") or {}
    if not grid_cfg:
        return selection.DEFAULT_GRID
    return selection.GridSpec(
        alphas=tuple(grid_cfg.get("alphas", selection.DEFAULT_GRID.alphas)),
        betas=tuple(grid_cfg.get("betas", selection.DEFAULT_GRID.betas)),
        gammas=tuple(grid_cfg.get("gammas", selection.DEFAULT_GRID.gammas)),
    )


def cmd_gen(args) -> int:
    config = _load_config(args.config, "gen")
    cfg = corpus.SyntheticConfig(
        n_entries=int(_get(args, config, "n-entries", 425)),
        mean_candidates=float(_get(args, config, "mean-candidates", 35.80)),
        mean_positives=float(_get(args, config, "mean-positives", 1.17)),
        vocab_size=int(_get(args, config, "vocab-size", 5000)),
        seed=int(_get(args, config, "seed", 0)),
    )
    dataset = corpus.generate_synthetic(cfg)
    corpus.write_dataset(dataset, args.out)
    report = corpus.validate_dataset(dataset)
    print(
        f"wrote {report.n_entries} entries to {args.out} "
        f"(mean candidates {report.mean_candidates:.2f}, "
        f"mean positives {report.mean_positives:.2f})"
    )
    return EXIT_OK


def cmd_score(args) -> int:
    config = _load_config(args.config, "score")
    dataset = _load_data(args, config)
    scorer = _get(args, config, "scorer", "bm25")
    if scorer == "bm25":
        params = ranking.Bm25Params(
            k1=float(_get(args, config, "k1", 0.9)),
            b=float(_get(args, config, "b", 0.4)),
            stopwords=bool(_get(args, config, "stopwords", False)),
            stem=bool(_get(args, config, "stem", False)),
        )
        model_id = _get(args, config, "model-id", "bm25")
        run = ranking.bm25_score_dataset(
            dataset, params, model_id, normalize=bool(_get(args, config, "normalize", False))
        )
    elif scorer == "remote":
        endpoint = _get(args, config, "endpoint", None)
        if not endpoint:
            raise DataError("remote scorer requires --endpoint")
        remote_cfg = ranking.RemoteConfig(
            max_in_flight=args.threads,
            timeout=float(_get(args, config, "timeout", 30.0)),
            retries=int(_get(args, config, "retries", 2)),
        )
        model_id = _get(args, config, "model-id", "remote")
        run = ranking.remote_score_dataset(dataset, endpoint, model_id, remote_cfg)
    else:
        raise DataError(f"unknown scorer {scorer!r}")
    ranking.write_run(run, args.out)
    print(f"wrote {len(run.records())} records to {args.out}")
    return EXIT_OK


def cmd_tune(args) -> int:
    config = _load_config(args.config, "tune")
    dataset = _load_data(args, config)
    run = ranking.read_run(args.run)
    result = selection.grid_search(run, dataset, _grid_from_config(config))
    best_json = result.best.to_json()
    print(best_json)
    out_params = _get(args, config, "out-params", None)
    if out_params:
        Path(out_params).write_text(best_json + "\n", encoding="utf-8")
    out_table = _get(args, config, "out-table", None)
    if out_table:
        result.write_csv(out_table)
    return EXIT_OK


def cmd_predict(args) -> int:
    config = _load_config(args.config, "predict")
    dataset = _load_data(args, config)
    run = ranking.read_run(args.run)
    params = _resolve_params(args, config)
    predictions = selection.select_run(run, dataset, params)
    selection.write_predictions(predictions, args.out)
    n_selected = sum(len(p.selected) for p in predictions)
    print(f"wrote {n_selected} selections for {len(predictions)} entries to {args.out}")
    return EXIT_OK


def cmd_ensemble(args) -> int:
    config = _load_config(args.config, "ensemble")
    params = _resolve_params(args, config)
    sets = []
    for path in args.inputs:
        run = ranking.read_run(path)
        sets.append(ensemble.answer_set_from_run(run))
    data_dir = _get(args, config, "data", None)
    if data_dir:
        # Entries whose selection was empty leave no lines in an answer
        # file; restore them so coverage checks compare like with like.
        dataset = _load_data(args, config)
        entry_ids = [e.entry_id for e in dataset.entries]
        sets = [
            ensemble.AnswerSet(s.model_id, {eid: s.answers.get(eid, []) for eid in entry_ids})
            for s in sets
        ]
    predictions = ensemble.combine(sets, params, normalize=args.normalize)
    selection.write_predictions(predictions, args.out)
    print(f"combined {len(sets)} answer sets into {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    config = _load_config(args.config, "eval")
    dataset = _load_data(args, config)
    predictions = selection.read_predictions(args.pred)
    result = metrics.evaluate(predictions, dataset)
    print(result.to_json())
    out = _get(args, config, "out", None)
    if out:
        Path(out).write_text(result.to_json() + "\n", encoding="utf-8")
    breakdown = _get(args, config, "breakdown", None)
    if breakdown:
        metrics.write_breakdown_csv(metrics.per_entry_breakdown(predictions, dataset), breakdown)
    return EXIT_OK


def _report_row(desc: str, params_text: str, result: metrics.EvalResult) -> str:
    return (
        f"| {desc} | {params_text} | {result.precision:.4f} "
        f"| {result.recall:.4f} | {result.f1:.4f} |"
    )


def cmd_report(args) -> int:
    config = _load_config(args.config, "report")
    dataset = _load_data(args, config)
    lines = [
        "| Description | alpha, beta, gamma | Precision | Recall | F1 |",
        "| --- | --- | --- | --- | --- |",
    ]
    for spec in args.row or []:
        parts = spec.split(":")
        if len(parts) not in (2, 3):
            raise DataError(f"--row expects DESC:PREDFILE[:alpha,beta,gamma], got {spec!r}")
        desc, pred_path = parts[0], parts[1]
        params_text = parts[2] if len(parts) == 3 else "-"
        result = metrics.evaluate(selection.read_predictions(pred_path), dataset)
        lines.append(_report_row(desc, params_text, result))
    for spec in args.ablation or []:
        parts = spec.split(":")
        if len(parts) != 3:
            raise DataError(f"--ablation expects DESC:RUNFILE:alpha,beta,gamma, got {spec!r}")
        desc, run_path, params_text = parts
        run = ranking.read_run(run_path)
        baseline = selection.select_run(run, dataset, selection.BASELINE_PARAMS)
        tuned = selection.select_run(run, dataset, _parse_params(params_text))
        lines.append(_report_row(f"{desc} (no rule)", "0, 1, 0", metrics.evaluate(baseline, dataset)))
        lines.append(_report_row(desc, params_text, metrics.evaluate(tuned, dataset)))
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entailrank", description="Case-entailment ranking experiments"
    )
    parser.add_argument("--config", help="TOML config; flags override its values")
    parser.add_argument("--threads", type=int, default=4, help="worker parallelism bound")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--n-entries", type=int)
    p.add_argument("--mean-candidates", type=float)
    p.add_argument("--mean-positives", type=float)
    p.add_argument("--vocab-size", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("score", help="score a dataset into a run file")
    p.add_argument("--scorer", choices=["bm25", "remote"])
    p.add_argument("--data")
    p.add_argument("--split", choices=list(corpus.SPLITS))
    p.add_argument("--out", required=True)
    p.add_argument("--model-id")
    p.add_argument("--k1", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--stopwords", action="store_const", const=True)
    p.add_argument("--stem", action="store_const", const=True)
    p.add_argument("--normalize", action="store_const", const=True)
    p.add_argument("--endpoint")
    p.add_argument("--timeout", type=float)
    p.add_argument("--retries", type=int)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("tune", help="grid-search selection params on labeled data")
    p.add_argument("--run", required=True)
    p.add_argument("--data")
    p.add_argument("--split", choices=list(corpus.SPLITS))
    p.add_argument("--out-params")
    p.add_argument("--out-table")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("predict", help="apply selection params to a run")
    p.add_argument("--run", required=True)
    p.add_argument("--data")
    p.add_argument("--split", choices=list(corpus.SPLITS))
    p.add_argument("--params")
    p.add_argument("--params-file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("ensemble", help="combine answer files and reselect")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--params")
    p.add_argument("--params-file")
    p.add_argument("--data")
    p.add_argument("--split", choices=list(corpus.SPLITS))
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("eval", help="micro P/R/F1 of a prediction file")
    p.add_argument("--pred", required=True)
    p.add_argument("--data")
    p.add_argument("--split", choices=list(corpus.SPLITS))
    p.add_argument("--out")
    p.add_argument("--breakdown")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="markdown results table")
    p.add_argument("--data")
    p.add_argument("--split", choices=list(corpus.SPLITS))
    p.add_argument("--row", action="append", metavar="DESC:PREDFILE[:PARAMS]")
    p.add_argument("--ablation", action="append", metavar="DESC:RUNFILE:PARAMS")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TransportError as exc:
        print(f"error: transport: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
