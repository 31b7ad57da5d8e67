"""Exception hierarchy shared by all groundcheck modules."""


class GroundcheckError(Exception):
    """Base class for all errors raised by this package."""


class InvalidPolygonError(GroundcheckError):
    """Polygon has fewer than 3 vertices, non-finite coordinates, or zero area."""


class MalformedRleError(GroundcheckError):
    """Run-length counts do not describe a full height*width grid."""


class ShapeMismatchError(GroundcheckError):
    """Operands do not share the dimensions the operation requires."""


class InsufficientMasksError(GroundcheckError):
    """Pairwise mask statistics need at least two masks."""


class InsufficientCandidatesError(GroundcheckError):
    """Pairwise similarity needs at least two embeddings."""


class DegenerateEmbeddingError(GroundcheckError):
    """Embedding vector is all-zero or otherwise unusable."""


class AlignmentError(GroundcheckError):
    """Candidate, mask, and embedding lists are not index-aligned."""


class InvalidInputError(GroundcheckError):
    """An argument violates a documented precondition."""


class NotFoundError(GroundcheckError):
    """A requested instance, candidate, or table entry does not exist."""


class MalformedDatasetError(GroundcheckError):
    """A dataset, fixture, or embedding file violates its schema.

    ``line`` is the 1-based line number of the offending record when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateIdError(GroundcheckError):
    """Two records share an instance_id that must be unique."""


class ProviderError(GroundcheckError):
    """A proposal, grounding, or embedding provider failed.

    Carries the instance id (and endpoint, for remote providers) so batch
    runs can report which item failed.
    """

    def __init__(self, message, instance_id=None, endpoint=None):
        parts = [message]
        if instance_id is not None:
            parts.append(f"instance={instance_id}")
        if endpoint is not None:
            parts.append(f"endpoint={endpoint}")
        super().__init__(" | ".join(parts))
        self.instance_id = instance_id
        self.endpoint = endpoint


class ConsistencyError(GroundcheckError):
    """Evaluation inputs disagree (e.g. a decision for an unknown instance)."""
