"""Combine the answer sets of several models into one final answer set.

Per entry: concatenate every model's answers, collapse duplicates keeping
the highest score, then reapply the three-rule selection. Merged pairs
are ordered by descending score with candidate_id as the tie-break, so
the result is invariant under permutation of the input sets.
"""

from __future__ import annotations

from dataclasses import dataclass

from entailrank.errors import CoverageError, DataError
from entailrank.ranking import Run, ScoreRecord, minmax_normalize
from entailrank.selection import Prediction, SelectionParams, select_answers


@dataclass(frozen=True)
class AnswerSet:
    model_id: str
    answers: dict[str, list[tuple[str, float]]]

    def __post_init__(self):
        for entry_id, pairs in self.answers.items():
            ids = [cid for cid, _ in pairs]
            if len(set(ids)) != len(ids):
                raise DataError(f"answer set {self.model_id!r}: duplicate candidates in {entry_id!r}")


def answer_set_from_run(run: Run) -> AnswerSet:
    """Treat a full (or pre-filtered) run file as one model's answers."""
    return AnswerSet(run.model_id, {eid: list(cands.items()) for eid, cands in run.scores.items()})


def answer_set_from_predictions(model_id: str, predictions: list[Prediction]) -> AnswerSet:
    return AnswerSet(model_id, {p.entry_id: list(p.selected) for p in predictions})


def combine(
    sets: list[AnswerSet], params: SelectionParams, normalize: bool = False
) -> list[Prediction]:
    """Concatenate, dedupe keeping the max score, reselect; per entry.

    All input sets must cover the same entries. The normalize flag
    min-max rescales each set's scores per entry before merging, for
    mixing scorers on different scales.
    """
    if not sets:
        raise DataError("combine requires at least one answer set")
    entry_ids = set(sets[0].answers)
    for answer_set in sets[1:]:
        if set(answer_set.answers) != entry_ids:
            diff = sorted(entry_ids ^ set(answer_set.answers))
            raise CoverageError(
                f"answer sets {sets[0].model_id!r} and {answer_set.model_id!r} "
                f"cover different entries: {diff[:5]}"
            )

    predictions = []
    for entry_id in sets[0].answers:
        merged: dict[str, float] = {}
        for answer_set in sets:
            pairs = answer_set.answers[entry_id]
            if normalize and pairs:
                records = [ScoreRecord(entry_id, cid, s) for cid, s in pairs]
                pairs = [(r.candidate_id, r.score) for r in minmax_normalize(records)]
            for cid, score in pairs:
                if cid not in merged or score > merged[cid]:
                    merged[cid] = score
        scored = sorted(merged.items(), key=lambda pair: (-pair[1], pair[0]))
        selected = tuple(select_answers(scored, params)) if scored else ()
        predictions.append(Prediction(entry_id, selected))
    return predictions
