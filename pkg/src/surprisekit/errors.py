"""Exception types shared across the toolkit.

Every error raised by library code derives from :class:`SurpriseKitError`,
so callers (and the CLI) can catch one base class and map it to exit code 1.
"""


class SurpriseKitError(Exception):
    """Base class for all toolkit errors."""


class FormatError(SurpriseKitError):
    """Malformed or invalid ATRC payload.

    ``kind`` identifies the failing check: "magic", "length", "dtype",
    "version" for parse failures, "invariant" for write-side validation.
    """

    def __init__(self, kind: str, message: str = ""):
        self.kind = kind
        super().__init__(f"{kind}: {message}" if message else kind)


class ManifestError(SurpriseKitError):
    """Dataset manifest is inconsistent with the files it references."""

    def __init__(self, entry: str, message: str):
        self.entry = entry
        super().__init__(f"entry {entry!r}: {message}")


class ShapeError(SurpriseKitError):
    """Dimension mismatch between data and a fitted model or parameter."""


class InsufficientData(SurpriseKitError):
    """Too few samples for the requested statistic."""


class DegenerateData(SurpriseKitError):
    """Data has no usable variation (constant columns, zero std, ...)."""


class SingularCovariance(SurpriseKitError):
    """Sample covariance is not positive definite."""


class ModelFormatError(SurpriseKitError):
    """Serialized network file violates the model schema."""


class NotKillable(SurpriseKitError):
    """No mutation ratio up to 1.0 kills the model on the given inputs."""
