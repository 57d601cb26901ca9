"""Relevance scoring and score interchange.

A native BM25 scorer over each entry's private candidate pool, a run-file
reader/writer, and an HTTP client for a remote neural scorer. All paths
emit the same Run object.
"""

from __future__ import annotations

import math
import re
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import requests

from entailrank.corpus import Dataset, Entry
from entailrank.errors import CoverageError, DataError, RunFormatError, TransportError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Minimal English function-word list; only used behind the stopwords flag.
_STOPWORDS = frozenset(
    "a an and are as at be but by for if in into is it no not of on or "
    "s so such t that the their then there these they this to was will with".split()
)

_STEM_SUFFIXES = ("ingly", "edly", "ing", "ed", "es", "s")


def _light_stem(token: str) -> str:
    for suffix in _STEM_SUFFIXES:
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    return token


def tokenize(text: str, *, stopwords: bool = False, stem: bool = False) -> list[str]:
    """Lowercase and split on any non-alphanumeric codepoint.

    Empty tokens are dropped; purely numeric tokens are kept. Stopword
    removal and light suffix stemming are off by default.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    if stopwords:
        tokens = [t for t in tokens if t not in _STOPWORDS]
    if stem:
        tokens = [_light_stem(t) for t in tokens]
    return tokens


@dataclass(frozen=True)
class ScoreRecord:
    entry_id: str
    candidate_id: str
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise DataError(
                f"non-finite score for ({self.entry_id}, {self.candidate_id}): {self.score}"
            )


@dataclass(frozen=True)
class Run:
    """One model's scores for every (entry, candidate) pair it covers."""

    model_id: str
    scores: dict[str, dict[str, float]]

    def records(self) -> list[ScoreRecord]:
        return [
            ScoreRecord(eid, cid, s)
            for eid, cands in self.scores.items()
            for cid, s in cands.items()
        ]

    def pair_ids(self) -> set[tuple[str, str]]:
        return {(eid, cid) for eid, cands in self.scores.items() for cid in cands}

    def check_coverage(self, dataset: Dataset) -> None:
        """Require the run's key set to equal the dataset's pair set exactly."""
        expected = dataset.pair_ids()
        got = self.pair_ids()
        missing = expected - got
        extra = got - expected
        if missing or extra:
            detail = []
            if missing:
                detail.append(f"missing {sorted(missing)[:5]}")
            if extra:
                detail.append(f"unknown {sorted(extra)[:5]}")
            raise CoverageError(
                f"run {self.model_id!r} does not cover the dataset: " + "; ".join(detail)
            )


def run_from_records(model_id: str, records: list[ScoreRecord]) -> Run:
    scores: dict[str, dict[str, float]] = {}
    for rec in records:
        per_entry = scores.setdefault(rec.entry_id, {})
        if rec.candidate_id in per_entry:
            raise DataError(f"duplicate pair ({rec.entry_id}, {rec.candidate_id})")
        per_entry[rec.candidate_id] = rec.score
    return Run(model_id, scores)


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4
    stopwords: bool = False
    stem: bool = False

    def __post_init__(self):
        if self.k1 < 0:
            raise DataError(f"k1 must be nonnegative, got {self.k1}")
        if not 0 <= self.b <= 1:
            raise DataError(f"b must be in [0, 1], got {self.b}")


def bm25_score_entry(entry: Entry, params: Bm25Params = Bm25Params()) -> list[ScoreRecord]:
    """Okapi BM25 of the fragment against the entry's own candidate pool.

    N, document frequencies, and avgdl come from the pool itself: each
    entry is a self-contained corpus in this task. idf uses the
    ln(1 + (N - df + 0.5)/(df + 0.5)) form, which is nonnegative even at
    df = N.
    """
    opts = {"stopwords": params.stopwords, "stem": params.stem}
    docs = [tokenize(c.text, **opts) for c in entry.candidates]
    n_docs = len(docs)
    avgdl = sum(len(d) for d in docs) / n_docs
    term_freqs = [Counter(d) for d in docs]

    df = Counter()
    for tf in term_freqs:
        df.update(tf.keys())

    query_terms = sorted(set(tokenize(entry.fragment, **opts)))
    records = []
    for cand, doc, tf in zip(entry.candidates, docs, term_freqs):
        score = 0.0
        norm = params.k1 * (1 - params.b + params.b * (len(doc) / avgdl if avgdl else 0.0))
        for term in query_terms:
            freq = tf.get(term)
            if not freq:
                continue
            idf = math.log(1 + (n_docs - df[term] + 0.5) / (df[term] + 0.5))
            score += idf * freq * (params.k1 + 1) / (freq + norm)
        records.append(ScoreRecord(entry.entry_id, cand.candidate_id, score))
    return records


def minmax_normalize(records: list[ScoreRecord]) -> list[ScoreRecord]:
    """Rescale one entry's scores to [0, 1]; a constant pool maps to 0."""
    lo = min(r.score for r in records)
    hi = max(r.score for r in records)
    span = hi - lo
    return [
        ScoreRecord(r.entry_id, r.candidate_id, (r.score - lo) / span if span else 0.0)
        for r in records
    ]


def bm25_score_dataset(
    dataset: Dataset,
    params: Bm25Params = Bm25Params(),
    model_id: str = "bm25",
    normalize: bool = False,
) -> Run:
    records: list[ScoreRecord] = []
    for entry in dataset.entries:
        entry_records = bm25_score_entry(entry, params)
        if normalize:
            entry_records = minmax_normalize(entry_records)
        records.extend(entry_records)
    return run_from_records(model_id, records)


def read_run(path) -> Run:
    """Parse a run file: entry_id<TAB>candidate_id<TAB>score<TAB>model_id."""
    model_id = None
    records = []
    seen: dict[tuple[str, str], int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise RunFormatError(f"{path}:{lineno}: expected 4 tab-separated fields")
            entry_id, candidate_id, score_str, line_model = fields
            try:
                score = float(score_str)
            except ValueError:
                raise RunFormatError(f"{path}:{lineno}: bad score {score_str!r}") from None
            if not math.isfinite(score):
                raise RunFormatError(f"{path}:{lineno}: non-finite score {score_str!r}")
            if model_id is None:
                model_id = line_model
            elif line_model != model_id:
                raise RunFormatError(
                    f"{path}:{lineno}: model_id {line_model!r} differs from {model_id!r}"
                )
            key = (entry_id, candidate_id)
            if key in seen:
                raise RunFormatError(
                    f"{path}:{lineno}: duplicate pair {key}, first seen on line {seen[key]}"
                )
            seen[key] = lineno
            records.append(ScoreRecord(entry_id, candidate_id, score))
    if model_id is None:
        raise RunFormatError(f"{path}: no records")
    return run_from_records(model_id, records)


def write_run(run: Run, path) -> None:
    """Write the run file format; scores use shortest round-trip rendering."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry_id in run.scores:
            for candidate_id, score in run.scores[entry_id].items():
                fh.write(f"{entry_id}\t{candidate_id}\t{score!r}\t{run.model_id}\n")


@dataclass(frozen=True)
class RemoteConfig:
    max_in_flight: int = 4
    timeout: float = 30.0
    retries: int = 2
    backoff: float = 0.5


def _score_one(session: requests.Session, url: str, query: str, document: str,
               cfg: RemoteConfig) -> float:
    last_exc = None
    for attempt in range(cfg.retries + 1):
        try:
            resp = session.post(
                url, json={"query": query, "document": document}, timeout=cfg.timeout
            )
            resp.raise_for_status()
            return resp.json()["score"]
        except (requests.RequestException, ValueError, KeyError) as exc:
            last_exc = exc
            if attempt < cfg.retries:
                time.sleep(cfg.backoff * (attempt + 1))
    raise TransportError(f"remote scoring failed after {cfg.retries + 1} attempts: {last_exc}")


def remote_score_dataset(
    dataset: Dataset,
    endpoint: str,
    model_id: str,
    config: RemoteConfig = RemoteConfig(),
) -> Run:
    """Score every pair via the remote service's POST /v1/score.

    All-or-nothing: any transport failure after retries or any invalid
    score aborts the whole run with no partial results.
    """
    url = endpoint.rstrip("/") + "/v1/score"
    pairs = [
        (entry.entry_id, cand.candidate_id, entry.fragment, cand.text)
        for entry in dataset.entries
        for cand in entry.candidates
    ]
    session = requests.Session()
    with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
        raw_scores = list(
            pool.map(lambda p: _score_one(session, url, p[2], p[3], config), pairs)
        )

    records = []
    for (entry_id, candidate_id, _, _), score in zip(pairs, raw_scores):
        if not isinstance(score, (int, float)) or not math.isfinite(float(score)) \
                or not 0.0 <= float(score) <= 1.0:
            raise DataError(
                f"remote score for ({entry_id}, {candidate_id}) outside [0,1]: {score!r}"
            )
        records.append(ScoreRecord(entry_id, candidate_id, float(score)))
    return run_from_records(model_id, records)
