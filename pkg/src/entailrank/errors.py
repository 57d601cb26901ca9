"""Exception hierarchy shared across the pipeline."""


class DataError(Exception):
    """Invalid dataset, run, or prediction data."""


class RunFormatError(DataError):
    """Malformed run file content (carries line numbers where possible)."""


class CoverageError(DataError):
    """A run or answer set does not cover the expected (entry, candidate) pairs."""


class TransportError(Exception):
    """Remote scoring failed after retries; no partial results are kept."""
