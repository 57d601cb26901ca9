import random

import pytest

from entailrank import corpus, metrics
from entailrank.errors import DataError
from entailrank.selection import Prediction
from tests.conftest import naive_micro


def dataset_with_gold(gold_by_entry, extra_pool=()):
    entries = []
    for eid, gold in gold_by_entry.items():
        pool = sorted(set(gold) | {"x1", "x2", "x3"} | set(extra_pool))
        cands = tuple(corpus.Candidate(cid, f"text {cid}") for cid in pool)
        entries.append(corpus.Entry(eid, "fragment", cands, frozenset(gold)))
    return corpus.Dataset(tuple(entries), "train")


def preds(retrieved_by_entry):
    return [
        Prediction(eid, tuple((cid, 1.0) for cid in sorted(sel)))
        for eid, sel in retrieved_by_entry.items()
    ]


class TestEvaluate:
    def test_perfect_predictions(self):
        dataset = dataset_with_gold({"e1": {"a"}, "e2": {"b", "c"}})
        result = metrics.evaluate(preds({"e1": {"a"}, "e2": {"b", "c"}}), dataset)
        assert result.precision == result.recall == result.f1 == 1.0

    def test_hand_counted_totals(self):
        # retrieved 4, relevant 5, correct 3
        dataset = dataset_with_gold({"e1": {"a", "b"}, "e2": {"c", "d", "e"}})
        result = metrics.evaluate(preds({"e1": {"a", "b"}, "e2": {"c", "x1"}}), dataset)
        assert (result.n_retrieved, result.n_relevant, result.n_correct) == (4, 5, 3)
        assert result.precision == 0.75
        assert result.recall == 0.6
        assert result.f1 == pytest.approx(2 / 3, abs=1e-12)

    def test_empty_retrieval(self):
        dataset = dataset_with_gold({"e1": {"a"}})
        result = metrics.evaluate([], dataset)
        assert result.precision == result.recall == result.f1 == 0.0

    def test_micro_not_macro(self):
        # Macro would average (1.0 + 0.0)/2 = 0.5; micro is 2/7.
        dataset = dataset_with_gold({"e1": {"a"}, "e2": {"b", "c", "d", "e"}})
        result = metrics.evaluate(preds({"e1": {"a"}, "e2": {"x1"}}), dataset)
        assert result.f1 == pytest.approx(2 * 0.5 * 0.2 / 0.7)
        assert result.f1 != 0.5

    def test_permutation_invariance(self):
        dataset = dataset_with_gold({"e1": {"a"}, "e2": {"b"}, "e3": {"c"}})
        p = preds({"e1": {"a"}, "e2": {"x1"}, "e3": {"c", "x2"}})
        assert metrics.evaluate(p, dataset) == metrics.evaluate(list(reversed(p)), dataset)

    def test_unknown_entry_rejected(self):
        dataset = dataset_with_gold({"e1": {"a"}})
        with pytest.raises(DataError, match="e9"):
            metrics.evaluate(preds({"e9": {"a"}}), dataset)

    def test_duplicate_predictions_rejected(self):
        dataset = dataset_with_gold({"e1": {"a"}})
        duplicated = preds({"e1": {"a"}}) * 2
        with pytest.raises(DataError, match="duplicate"):
            metrics.evaluate(duplicated, dataset)

    def test_correct_retrieval_never_hurts_recall(self):
        dataset = dataset_with_gold({"e1": {"a", "b"}})
        without = metrics.evaluate(preds({"e1": {"a"}}), dataset)
        with_extra = metrics.evaluate(preds({"e1": {"a", "b"}}), dataset)
        assert with_extra.recall >= without.recall

    def test_incorrect_retrieval_never_helps_precision(self):
        dataset = dataset_with_gold({"e1": {"a", "b"}})
        without = metrics.evaluate(preds({"e1": {"a"}}), dataset)
        with_extra = metrics.evaluate(preds({"e1": {"a", "x1"}}), dataset)
        assert with_extra.precision <= without.precision


class TestBreakdown:
    def test_intersection(self):
        dataset = dataset_with_gold({"e1": {"c2", "c3"}}, extra_pool=["c1"])
        rows = metrics.per_entry_breakdown(preds({"e1": {"c1", "c2"}}), dataset)
        assert rows[0].correct == {"c2"}

    def test_missing_entries_are_empty_rows(self):
        dataset = dataset_with_gold({"e1": {"a"}, "e2": {"b"}})
        rows = metrics.per_entry_breakdown(preds({"e1": {"a"}}), dataset)
        assert rows[1].retrieved == frozenset()

    def test_sums_match_evaluate_on_random_case(self):
        rng = random.Random(50)
        gold_by_entry = {}
        retrieved_by_entry = {}
        pool = [f"c{i}" for i in range(10)]
        for i in range(50):
            eid = f"e{i:02d}"
            gold_by_entry[eid] = set(rng.sample(pool, rng.randint(1, 3)))
            retrieved_by_entry[eid] = set(rng.sample(pool, rng.randint(0, 4)))
        dataset = dataset_with_gold(gold_by_entry, extra_pool=pool)
        p = preds(retrieved_by_entry)

        rows = metrics.per_entry_breakdown(p, dataset)
        result = metrics.evaluate(p, dataset)
        assert sum(len(r.retrieved) for r in rows) == result.n_retrieved
        assert sum(len(r.gold) for r in rows) == result.n_relevant
        assert sum(len(r.correct) for r in rows) == result.n_correct

        expected = naive_micro(retrieved_by_entry, gold_by_entry)
        assert (result.precision, result.recall, result.f1) == expected
