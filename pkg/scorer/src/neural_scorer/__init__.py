"""Neural relevance scorer: seq2seq reranker behind an HTTP API and a run dumper."""

from neural_scorer.model import RelevanceScorer, ScoreResult, render_prompt

__all__ = ["RelevanceScorer", "ScoreResult", "render_prompt"]

__version__ = "0.1.0"
