"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ValidationError (and subclasses) exit
with 1, OSError with 2, anything else with 3.
"""


class ValidationError(Exception):
    """Input violates a documented precondition or invariant."""


class FormatError(ValidationError):
    """File content is not in a supported format."""


class ManifestError(ValidationError):
    """Manifest CSV is malformed or inconsistent."""


class EmptyCorpusError(ValidationError):
    """A frame directory or corpus contains no usable images."""


class DegenerateMatrixError(ValidationError):
    """Co-occurrence displacement yields no valid pixel pairs."""


class EmptyDecompositionError(ValidationError):
    """Image is smaller than a single analysis window."""
