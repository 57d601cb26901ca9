"""Micro precision/recall/F1 over all entries, plus per-entry breakdowns.

Counts are summed over every entry first; precision, recall, and F1 are
computed once from the totals. Conventions: P = 0 when nothing is
retrieved, R = 0 when nothing is relevant, F1 = 0 when P + R = 0.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from entailrank.corpus import Dataset
from entailrank.errors import DataError
from entailrank.selection import Prediction


@dataclass(frozen=True)
class EvalResult:
    n_retrieved: int
    n_relevant: int
    n_correct: int
    precision: float
    recall: float
    f1: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "precision": self.precision,
                "recall": self.recall,
                "f1": self.f1,
                "counts": {
                    "retrieved": self.n_retrieved,
                    "relevant": self.n_relevant,
                    "correct": self.n_correct,
                },
            }
        )


@dataclass(frozen=True)
class EntryBreakdown:
    entry_id: str
    retrieved: frozenset[str]
    gold: frozenset[str]
    correct: frozenset[str]


def result_from_counts(n_retrieved: int, n_relevant: int, n_correct: int) -> EvalResult:
    precision = n_correct / n_retrieved if n_retrieved else 0.0
    recall = n_correct / n_relevant if n_relevant else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalResult(n_retrieved, n_relevant, n_correct, precision, recall, f1)


def _check_predictions(predictions: list[Prediction], dataset: Dataset) -> dict[str, Prediction]:
    known = dataset.by_id()
    by_entry: dict[str, Prediction] = {}
    for pred in predictions:
        if pred.entry_id not in known:
            raise DataError(f"prediction for unknown entry {pred.entry_id!r}")
        if pred.entry_id in by_entry:
            raise DataError(f"duplicate predictions for entry {pred.entry_id!r}")
        if known[pred.entry_id].gold is None:
            raise DataError(f"entry {pred.entry_id!r} has no gold labels")
        by_entry[pred.entry_id] = pred
    for entry in dataset.entries:
        if entry.gold is None:
            raise DataError(f"entry {entry.entry_id!r} has no gold labels")
    return by_entry


def per_entry_breakdown(predictions: list[Prediction], dataset: Dataset) -> list[EntryBreakdown]:
    """One row per dataset entry; entries without a prediction retrieve nothing."""
    by_entry = _check_predictions(predictions, dataset)
    rows = []
    for entry in dataset.entries:
        pred = by_entry.get(entry.entry_id)
        retrieved = frozenset(pred.selected_ids) if pred else frozenset()
        gold = frozenset(entry.gold)
        rows.append(EntryBreakdown(entry.entry_id, retrieved, gold, retrieved & gold))
    return rows


def evaluate(predictions: list[Prediction], dataset: Dataset) -> EvalResult:
    n_retrieved = n_relevant = n_correct = 0
    for row in per_entry_breakdown(predictions, dataset):
        n_retrieved += len(row.retrieved)
        n_relevant += len(row.gold)
        n_correct += len(row.correct)
    return result_from_counts(n_retrieved, n_relevant, n_correct)


def write_breakdown_csv(rows: list[EntryBreakdown], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["entry_id", "retrieved", "gold", "correct"])
        for row in rows:
            writer.writerow(
                [row.entry_id, " ".join(sorted(row.retrieved)),
                 " ".join(sorted(row.gold)), " ".join(sorted(row.correct))]
            )
