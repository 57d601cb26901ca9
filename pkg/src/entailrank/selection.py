"""Three-rule answer selection and exhaustive grid tuning.

A candidate is selected when it passes all three filters at once:
score >= alpha, rank-by-score <= beta, and score >= gamma * top score.
With nonnegative scores, alpha = 0 and gamma = 0 turn their rules into
no-ops, so (0, 1, 0) is the pure-argmax baseline.
"""

from __future__ import annotations

import bisect
import csv
import json
from dataclasses import dataclass
from itertools import product

from entailrank.corpus import Dataset
from entailrank.errors import DataError
from entailrank.ranking import Run


@dataclass(frozen=True)
class SelectionParams:
    alpha: float
    beta: int
    gamma: float

    def __post_init__(self):
        if self.alpha < 0:
            raise DataError(f"alpha must be nonnegative, got {self.alpha}")
        if self.beta < 1:
            raise DataError(f"beta must be >= 1, got {self.beta}")
        if not 0 <= self.gamma < 1:
            raise DataError(f"gamma must be in [0, 1), got {self.gamma}")

    def to_json(self) -> str:
        return json.dumps({"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma})


BASELINE_PARAMS = SelectionParams(0.0, 1, 0.0)


@dataclass(frozen=True)
class GridSpec:
    alphas: tuple[float, ...]
    betas: tuple[int, ...]
    gammas: tuple[float, ...]

    def __post_init__(self):
        for name, values in (("alphas", self.alphas), ("betas", self.betas), ("gammas", self.gammas)):
            if not values:
                raise DataError(f"grid {name} must be non-empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise DataError(f"grid {name} must be strictly increasing")
        SelectionParams(self.alphas[0], self.betas[0], self.gammas[-1])

    def triples(self) -> list[SelectionParams]:
        return [SelectionParams(a, b, g) for a, b, g in product(self.alphas, self.betas, self.gammas)]


DEFAULT_GRID = GridSpec(
    alphas=tuple(round(0.1 * i, 1) for i in range(10)),
    betas=tuple(range(1, 11)),
    gammas=tuple(round(0.1 * i, 1) for i in range(10))
    + (0.95, 0.99, 0.995, 0.999, 0.9995, 0.9999),
)


@dataclass(frozen=True)
class Prediction:
    entry_id: str
    selected: tuple[tuple[str, float], ...]

    @property
    def selected_ids(self) -> set[str]:
        return {cid for cid, _ in self.selected}


def select_answers(
    scored: list[tuple[str, float]], params: SelectionParams
) -> list[tuple[str, float]]:
    """Apply the three filters to one entry's scores.

    Output is ordered by descending score, stable by input order; ties at
    the beta boundary are cut by that stable order. May be empty.
    """
    if not scored:
        raise DataError("select_answers requires a non-empty score list")
    top = max(score for _, score in scored)
    ranked = sorted(scored, key=lambda pair: -pair[1])
    cutoff = max(params.alpha, params.gamma * top)
    return [pair for pair in ranked[: params.beta] if pair[1] >= cutoff]


def select_run(run: Run, dataset: Dataset, params: SelectionParams) -> list[Prediction]:
    """Apply select_answers entry-wise; requires exact run coverage."""
    run.check_coverage(dataset)
    predictions = []
    for entry in dataset.entries:
        scores = run.scores[entry.entry_id]
        scored = [(cid, scores[cid]) for cid in entry.candidate_ids]
        predictions.append(Prediction(entry.entry_id, tuple(select_answers(scored, params))))
    return predictions


@dataclass(frozen=True)
class GridRow:
    params: SelectionParams
    f1: float
    precision: float
    recall: float


@dataclass(frozen=True)
class GridSearchResult:
    best: SelectionParams
    best_f1: float
    table: tuple[GridRow, ...]

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["alpha", "beta", "gamma", "precision", "recall", "f1"])
            for row in self.table:
                writer.writerow(
                    [row.params.alpha, row.params.beta, row.params.gamma,
                     repr(row.precision), repr(row.recall), repr(row.f1)]
                )


def grid_search(run: Run, dataset: Dataset, grid: GridSpec = DEFAULT_GRID) -> GridSearchResult:
    """Evaluate every (alpha, beta, gamma) triple by micro F1.

    Ties go to the lexicographically smallest triple in sweep order. Per
    entry, the selected set under any triple is a prefix of the stable
    descending sort, so each cell costs one binary search instead of a
    full re-selection.
    """
    run.check_coverage(dataset)
    n_relevant = 0
    prepared = []
    for entry in dataset.entries:
        if entry.gold is None:
            raise DataError(f"grid_search requires gold labels; entry {entry.entry_id!r} has none")
        n_relevant += len(entry.gold)
        scores = run.scores[entry.entry_id]
        ranked = sorted(
            ((cid, scores[cid]) for cid in entry.candidate_ids), key=lambda pair: -pair[1]
        )
        ascending = sorted(score for _, score in ranked)
        gold_prefix = [0]
        for cid, _ in ranked:
            gold_prefix.append(gold_prefix[-1] + (cid in entry.gold))
        prepared.append((ascending, gold_prefix, ranked[0][1]))

    rows = []
    best: SelectionParams | None = None
    best_f1 = -1.0
    for params in grid.triples():
        n_retrieved = 0
        n_correct = 0
        for ascending, gold_prefix, top in prepared:
            cutoff = max(params.alpha, params.gamma * top)
            n_pass = len(ascending) - bisect.bisect_left(ascending, cutoff)
            k = min(params.beta, n_pass)
            n_retrieved += k
            n_correct += gold_prefix[k]
        precision = n_correct / n_retrieved if n_retrieved else 0.0
        recall = n_correct / n_relevant if n_relevant else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        rows.append(GridRow(params, f1, precision, recall))
        if f1 > best_f1:
            best, best_f1 = params, f1

    return GridSearchResult(best, best_f1, tuple(rows))


def read_predictions(path) -> list[Prediction]:
    """Parse a prediction file: entry_id<TAB>candidate_id<TAB>score."""
    per_entry: dict[str, list[tuple[str, float]]] = {}
    order: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields")
            entry_id, candidate_id, score_str = fields
            try:
                score = float(score_str)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad score {score_str!r}") from None
            if entry_id not in per_entry:
                per_entry[entry_id] = []
                order.append(entry_id)
            per_entry[entry_id].append((candidate_id, score))
    return [Prediction(eid, tuple(per_entry[eid])) for eid in order]


def write_predictions(predictions: list[Prediction], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pred in predictions:
            for candidate_id, score in pred.selected:
                fh.write(f"{pred.entry_id}\t{candidate_id}\t{score!r}\n")
