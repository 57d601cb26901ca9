"""Relevance scoring with a sequence-to-sequence reranker checkpoint.

The model reads ``Query: {q} Document: {d} Relevant:`` and the score is
the softmax probability of the "true" token against the "false" token at
the first decoded position. Decoding is a single greedy step, so scores
are deterministic.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass

import torch
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

DEFAULT_MODEL = "castorini/monot5-small-msmarco-10k"
DEFAULT_MAX_INPUT_TOKENS = 512

ENV_MODEL = "SCORER_MODEL"
ENV_MAX_INPUT_TOKENS = "SCORER_MAX_INPUT_TOKENS"
ENV_PORT = "SCORER_PORT"


class EmptyFieldError(ValueError):
    """Query or document is empty."""


def render_prompt(query: str, document: str) -> str:
    """Exact input template; no normalization beyond the empty-field check."""
    if not query.strip():
        raise EmptyFieldError("query must be non-empty")
    if not document.strip():
        raise EmptyFieldError("document must be non-empty")
    return f"Query: {query} Document: {document} Relevant:"


@dataclass(frozen=True)
class ScoreResult:
    score: float
    model_name: str
    truncated: bool


class RelevanceScorer:
    """Wraps one checkpoint; forward passes are serialized by a lock so
    concurrent callers get interleaving-independent results."""

    def __init__(self, model_name: str | None = None, max_input_tokens: int | None = None):
        self._lock = threading.Lock()
        self.model_name = model_name or os.environ.get(ENV_MODEL, DEFAULT_MODEL)
        self.max_input_tokens = max_input_tokens or int(
            os.environ.get(ENV_MAX_INPUT_TOKENS, DEFAULT_MAX_INPUT_TOKENS)
        )
        self.tokenizer = _from_pretrained(AutoTokenizer, self.model_name)
        self.model = _from_pretrained(AutoModelForSeq2SeqLM, self.model_name)
        self.model.eval()
        self.true_id = self.tokenizer.encode("true", add_special_tokens=False)[0]
        self.false_id = self.tokenizer.encode("false", add_special_tokens=False)[0]
        self._decoder_start = torch.tensor([[self.model.config.decoder_start_token_id]])

    def _encode(self, query: str, document: str) -> tuple[list[int], bool]:
        """Token ids for the prompt; the document is trimmed first, never
        the query, when the input limit is exceeded."""
        render_prompt(query, document)  # field validation
        encode = lambda text: self.tokenizer.encode(text, add_special_tokens=False)
        head = encode(f"Query: {query} Document:")
        tail = encode(" Relevant:")
        doc = encode(" " + document)
        eos = [self.tokenizer.eos_token_id]
        budget = self.max_input_tokens - len(head) - len(tail) - len(eos)
        truncated = len(doc) > budget
        if truncated:
            doc = doc[: max(0, budget)]
        return head + doc + tail + eos, truncated

    def _forward(self, input_ids: list[int]) -> torch.Tensor:
        with self._lock, torch.no_grad():
            output = self.model(
                input_ids=torch.tensor([input_ids]),
                decoder_input_ids=self._decoder_start,
            )
        return output.logits[0, 0]

    def score_pair(self, query: str, document: str) -> ScoreResult:
        input_ids, truncated = self._encode(query, document)
        p_true, _ = self._two_token_softmax(self._forward(input_ids))
        return ScoreResult(p_true, self.model_name, truncated)

    def relevance_probs(self, query: str, document: str) -> tuple[float, float]:
        """(P(true), P(false)) over the two relevance tokens; sums to 1."""
        input_ids, _ = self._encode(query, document)
        return self._two_token_softmax(self._forward(input_ids))

    def _two_token_softmax(self, logits: torch.Tensor) -> tuple[float, float]:
        pair = torch.softmax(logits[[self.true_id, self.false_id]], dim=0)
        return pair[0].item(), pair[1].item()

    def score_batch(self, pairs: list[tuple[str, str]]) -> list[ScoreResult]:
        """Element-wise score_pair, preserving request order."""
        return [self.score_pair(query, document) for query, document in pairs]


def _from_pretrained(cls, model_name: str):
    # The local cache is authoritative once populated; skipping the remote
    # check keeps startup working without network access.
    try:
        return cls.from_pretrained(model_name, local_files_only=True)
    except OSError:
        return cls.from_pretrained(model_name)
