"""Case-entailment ranking pipeline.

Scores candidate paragraphs against decision fragments, selects answer
sets with a three-rule filter, tunes the filter by grid search, combines
model answers, and evaluates with micro F1.
"""

from entailrank.errors import CoverageError, DataError, RunFormatError, TransportError

__all__ = ["CoverageError", "DataError", "RunFormatError", "TransportError"]

__version__ = "0.1.0"
