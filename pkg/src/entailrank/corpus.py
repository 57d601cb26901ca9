"""Datasets of decision fragments with private candidate-paragraph pools.

Handles the on-disk layout (one directory per entry, paragraphs as
individual files, optional ``labels.json``), validation with corpus-level
statistics, and a seeded synthetic generator whose positives share planted
tokens with the fragment so lexical scorers can separate them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from entailrank.errors import DataError

FRAGMENT_FILE = "entailed_fragment.txt"
PARAGRAPH_DIR = "paragraphs"
LABELS_FILE = "labels.json"

SPLITS = ("train", "test")


@dataclass(frozen=True)
class Candidate:
    candidate_id: str
    text: str

    def __post_init__(self):
        if not self.candidate_id:
            raise DataError("candidate_id must be non-empty")
        if not self.text.strip():
            raise DataError(f"candidate {self.candidate_id!r}: text is empty")


@dataclass(frozen=True)
class Entry:
    """One decision fragment plus its private pool of candidate paragraphs."""

    entry_id: str
    fragment: str
    candidates: tuple[Candidate, ...]
    gold: frozenset[str] | None = None

    def __post_init__(self):
        if not self.candidates:
            raise DataError(f"entry {self.entry_id!r}: candidate pool is empty")
        ids = [c.candidate_id for c in self.candidates]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise DataError(f"entry {self.entry_id!r}: duplicate candidate ids {dupes}")
        if self.gold is not None and not self.gold <= set(ids):
            unknown = sorted(self.gold - set(ids))
            raise DataError(f"entry {self.entry_id!r}: gold labels name unknown candidates {unknown}")

    @property
    def candidate_ids(self) -> list[str]:
        return [c.candidate_id for c in self.candidates]


@dataclass(frozen=True)
class Dataset:
    entries: tuple[Entry, ...]
    split: str

    def __post_init__(self):
        if self.split not in SPLITS:
            raise DataError(f"split must be one of {SPLITS}, got {self.split!r}")
        ids = [e.entry_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise DataError("duplicate entry ids in dataset")
        if self.split == "train":
            for e in self.entries:
                if e.gold is None:
                    raise DataError(f"train entry {e.entry_id!r} has no gold labels")

    def pair_ids(self) -> set[tuple[str, str]]:
        return {(e.entry_id, cid) for e in self.entries for cid in e.candidate_ids}

    def by_id(self) -> dict[str, Entry]:
        return {e.entry_id: e for e in self.entries}


@dataclass(frozen=True)
class SyntheticConfig:
    n_entries: int
    mean_candidates: float
    mean_positives: float
    vocab_size: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.n_entries <= 0 or self.vocab_size <= 0:
            raise DataError("n_entries and vocab_size must be positive")
        if self.mean_candidates <= 0 or self.mean_positives <= 0:
            raise DataError("means must be positive")
        if self.mean_positives > self.mean_candidates:
            raise DataError("mean_positives must not exceed mean_candidates")
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must fit in an unsigned 64-bit int")


@dataclass
class ValidationReport:
    n_entries: int = 0
    mean_candidates: float = 0.0
    mean_positives: float | None = None
    mean_fragment_tokens: float = 0.0
    mean_candidate_tokens: float = 0.0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _read_text(path: Path) -> str:
    # A single trailing LF is a file terminator, not part of the text.
    content = path.read_text(encoding="utf-8")
    return content[:-1] if content.endswith("\n") else content


def load_dataset(root: str | Path, split: str) -> Dataset:
    """Load a dataset from the directory layout.

    Expects ``<root>/<entry_id>/entailed_fragment.txt`` plus
    ``<root>/<entry_id>/paragraphs/<candidate_id>.txt`` and an optional
    ``<root>/labels.json``. Candidate order is lexicographic by filename.
    """
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"dataset root {root} does not exist")

    labels: dict[str, list[str]] = {}
    labels_path = root / LABELS_FILE
    if labels_path.exists():
        try:
            raw = json.loads(labels_path.read_text(encoding="utf-8"))
            labels = {str(k): [str(c) for c in v] for k, v in raw.items()}
        except (json.JSONDecodeError, AttributeError, TypeError) as exc:
            raise DataError(f"malformed labels file {labels_path}: {exc}") from exc

    entries = []
    for entry_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        entry_id = entry_dir.name
        fragment_path = entry_dir / FRAGMENT_FILE
        if not fragment_path.exists():
            raise DataError(f"entry {entry_id!r}: missing {FRAGMENT_FILE}")
        para_dir = entry_dir / PARAGRAPH_DIR
        para_files = sorted(para_dir.glob("*.txt")) if para_dir.is_dir() else []
        if not para_files:
            raise DataError(f"entry {entry_id!r}: empty candidate pool")
        candidates = tuple(Candidate(p.stem, _read_text(p)) for p in para_files)

        gold = None
        if entry_id in labels:
            gold = frozenset(labels[entry_id])
            known = {c.candidate_id for c in candidates}
            unknown = sorted(gold - known)
            if unknown:
                raise DataError(f"entry {entry_id!r}: labels name unknown candidates {unknown}")
        entries.append(Entry(entry_id, _read_text(fragment_path), candidates, gold))

    return Dataset(tuple(entries), split)


def write_dataset(dataset: Dataset, root: str | Path) -> None:
    """Export a dataset to the on-disk layout (inverse of load_dataset)."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    labels = {}
    for entry in dataset.entries:
        entry_dir = root / entry.entry_id
        para_dir = entry_dir / PARAGRAPH_DIR
        para_dir.mkdir(parents=True, exist_ok=True)
        (entry_dir / FRAGMENT_FILE).write_text(entry.fragment + "\n", encoding="utf-8")
        for cand in entry.candidates:
            (para_dir / f"{cand.candidate_id}.txt").write_text(cand.text + "\n", encoding="utf-8")
        if entry.gold is not None:
            labels[entry.entry_id] = sorted(entry.gold)
    if labels:
        (root / LABELS_FILE).write_text(
            json.dumps(labels, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def validate_dataset(dataset: Dataset) -> ValidationReport:
    """Compute corpus statistics and collect invariant violations.

    Violations are reported, not raised: the report is data.
    """
    from entailrank.ranking import tokenize

    report = ValidationReport()
    report.n_entries = len(dataset.entries)
    if not dataset.entries:
        report.violations.append("no entries")
        return report

    seen_entry_ids = set()
    n_candidates = 0
    n_positives = 0
    n_labeled = 0
    fragment_tokens = 0
    candidate_tokens = 0
    for entry in dataset.entries:
        if entry.entry_id in seen_entry_ids:
            report.violations.append(f"duplicate entry id {entry.entry_id!r}")
        seen_entry_ids.add(entry.entry_id)

        cids = entry.candidate_ids
        for cid in sorted({c for c in cids if cids.count(c) > 1}):
            report.violations.append(f"entry {entry.entry_id!r}: duplicate candidate id {cid!r}")
        if not entry.fragment.strip():
            report.violations.append(f"entry {entry.entry_id!r}: empty fragment")

        n_candidates += len(entry.candidates)
        fragment_tokens += len(tokenize(entry.fragment))
        for cand in entry.candidates:
            candidate_tokens += len(tokenize(cand.text))
            if not cand.text.strip():
                report.violations.append(
                    f"entry {entry.entry_id!r}: empty candidate {cand.candidate_id!r}"
                )
        if entry.gold is not None:
            n_labeled += 1
            n_positives += len(entry.gold)
            if not entry.gold:
                report.violations.append(f"entry {entry.entry_id!r}: empty gold set")
        elif dataset.split == "train":
            report.violations.append(f"train entry {entry.entry_id!r} has no gold labels")

    report.mean_candidates = n_candidates / report.n_entries
    if n_labeled:
        report.mean_positives = n_positives / n_labeled
    report.mean_fragment_tokens = fragment_tokens / report.n_entries
    report.mean_candidate_tokens = candidate_tokens / n_candidates
    return report


def _positive_rate(mean_positives: float) -> float:
    """Poisson rate l such that E[max(1, Poisson(l))] = mean_positives.

    Every entry needs at least one positive, so the raw draw is clamped to
    1 from below; E[max(1, X)] = l + exp(-l), which is inverted here by
    bisection. Means at or below 1 collapse to exactly one positive.
    """
    target = mean_positives
    if target <= 1.0:
        return 0.0
    lo, hi = 0.0, target
    for _ in range(80):
        mid = (lo + hi) / 2
        if mid + math.exp(-mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def generate_synthetic(cfg: SyntheticConfig) -> Dataset:
    """Generate a labeled dataset, deterministic for a fixed seed.

    Positive candidates copy 30% of the fragment's tokens so BM25 can
    separate them from negatives drawn uniformly from the vocabulary.
    """
    rng = np.random.default_rng(cfg.seed)
    vocab = np.array([f"w{i:05d}" for i in range(cfg.vocab_size)])
    rate = _positive_rate(cfg.mean_positives)
    cand_sd = max(1.0, 0.15 * cfg.mean_candidates)
    id_width = max(4, len(str(cfg.n_entries - 1)))

    fragment_len = 37
    candidate_len = 100
    plant_len = max(1, round(0.3 * fragment_len))

    entries = []
    for i in range(cfg.n_entries):
        n_cand = max(2, int(round(rng.normal(cfg.mean_candidates, cand_sd))))
        n_pos = min(n_cand, max(1, int(rng.poisson(rate))))

        fragment_tokens = rng.choice(vocab, size=fragment_len)
        positive_idx = set(rng.choice(n_cand, size=n_pos, replace=False).tolist())

        candidates = []
        for j in range(n_cand):
            tokens = rng.choice(vocab, size=candidate_len)
            if j in positive_idx:
                planted = rng.choice(fragment_tokens, size=plant_len, replace=False)
                slots = rng.choice(candidate_len, size=plant_len, replace=False)
                tokens[slots] = planted
            candidates.append(Candidate(f"{j:03d}", " ".join(tokens)))

        gold = frozenset(f"{j:03d}" for j in positive_idx)
        entries.append(Entry(f"e{i:0{id_width}d}", " ".join(fragment_tokens), tuple(candidates), gold))

    return Dataset(tuple(entries), "train")
