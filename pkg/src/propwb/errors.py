"""Exception types shared across the workbench."""


class PropwbError(Exception):
    """Base class for all workbench errors."""


class UnknownLabelError(PropwbError):
    def __init__(self, label):
        super().__init__(f"unknown label: {label!r}")
        self.label = label


class IngestError(PropwbError):
    """Corpus file could not be ingested."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MalformedResponseError(PropwbError):
    """LLM response is not valid JSON."""


class SchemaViolationError(PropwbError):
    """LLM response JSON does not match the output schema."""

    def __init__(self, message, path=()):
        loc = "/".join(str(p) for p in path) or "<root>"
        super().__init__(f"at {loc}: {message}")
        self.path = tuple(path)


class SpanNotFoundError(PropwbError):
    """Extracted span text does not occur in the source document."""

    def __init__(self, span):
        super().__init__(f"span not found in document text: {span!r}")
        self.span = span


class GatewayError(PropwbError):
    """Transport-level failure talking to the LLM endpoint."""


class EmptyBundleError(PropwbError):
    """Aggregation requested on a bundle without successful runs."""


class WrongRunCountError(PropwbError):
    """Stability analysis requires exactly k successful runs per bundle."""


class NoPairableValuesError(PropwbError):
    """Agreement matrix has fewer than two pairable values."""


class SingularMatrixError(PropwbError):
    """Reduced covariance matrix is singular."""


class DegenerateTableError(PropwbError):
    """Contingency table has fewer than two usable categories."""


class ServiceError(PropwbError):
    """Review-service contract violation (assignment, duplicates, gating)."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
