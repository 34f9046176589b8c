"""Exception hierarchy shared across the package.

Every error raised by library code derives from :class:`AhmoseError` so the
CLI can catch one type and tag it with the failing pipeline stage.
"""


class AhmoseError(Exception):
    """Base class for all errors raised by this package."""


class DatasetError(AhmoseError):
    """Invalid tabular data: malformed CSV, non-numeric cells, bad partitions."""


class ModelError(AhmoseError):
    """Invalid model specification or unfittable training problem."""


class SingularSystemError(ModelError):
    """Zero-penalty linear solve hit a singular normal-equations system."""


class ExplainError(AhmoseError):
    """Explanation request outside the exact-enumeration contract."""


class KnowledgeError(AhmoseError):
    """Invalid rule table / interval set, or no evidence for an interval."""


class AgreementError(AhmoseError):
    """Inconsistent inputs when scoring explanations against knowledge."""


class ProjectError(AhmoseError):
    """Broken project bundle: dangling references, schema mismatch, bad files."""
