"""Shared fixtures and independent oracle implementations.

The oracles deliberately re-derive results by brute force (naive
enumeration, recount-from-scratch F1) so they stay independent of the
code paths they check.
"""

from __future__ import annotations

import random
from itertools import product

import pytest

from entailrank.selection import GridSpec, SelectionParams


def naive_select(scored, params):
    """Enumerate the three rules candidate by candidate; returns a set of ids."""
    top = max(score for _, score in scored)
    order = sorted(range(len(scored)), key=lambda i: -scored[i][1])
    ranks = {idx: pos + 1 for pos, idx in enumerate(order)}
    selected = set()
    for i, (cid, score) in enumerate(scored):
        rule1 = score >= params.alpha
        rule2 = ranks[i] <= params.beta
        rule3 = score >= params.gamma * top
        if rule1 and rule2 and rule3:
            selected.add(cid)
    return selected


def naive_micro(retrieved_by_entry, gold_by_entry):
    """Recount precision/recall/F1 from per-entry sets."""
    n_ret = sum(len(v) for v in retrieved_by_entry.values())
    n_rel = sum(len(v) for v in gold_by_entry.values())
    n_cor = sum(
        len(retrieved_by_entry.get(eid, set()) & gold) for eid, gold in gold_by_entry.items()
    )
    precision = n_cor / n_ret if n_ret else 0.0
    recall = n_cor / n_rel if n_rel else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def naive_grid_search(scored_by_entry, gold_by_entry, grid: GridSpec):
    """Exhaustive sweep using only the naive pieces above."""
    rows = []
    best = None
    best_f1 = -1.0
    for alpha, beta, gamma in product(grid.alphas, grid.betas, grid.gammas):
        params = SelectionParams(alpha, beta, gamma)
        retrieved = {eid: naive_select(scored, params) for eid, scored in scored_by_entry.items()}
        precision, recall, f1 = naive_micro(retrieved, gold_by_entry)
        rows.append((params, f1, precision, recall))
        if f1 > best_f1:
            best, best_f1 = params, f1
    return best, best_f1, rows


def random_score_vector(rng: random.Random, max_n: int = 12):
    """Candidate ids with scores in [0, 1]; coarse rounding plants ties."""
    n = rng.randint(1, max_n)
    scored = []
    for i in range(n):
        score = rng.random()
        if rng.random() < 0.5:
            score = round(score, 1)
        scored.append((f"c{i:02d}", score))
    return scored


def random_grid_params(rng: random.Random):
    from entailrank.selection import DEFAULT_GRID

    return SelectionParams(
        rng.choice(DEFAULT_GRID.alphas),
        rng.choice(DEFAULT_GRID.betas),
        rng.choice(DEFAULT_GRID.gammas),
    )


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
