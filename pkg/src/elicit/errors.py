"""Exception hierarchy shared by all workbench modules."""


class ElicitError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(ElicitError):
    """Malformed or semantically invalid network schema."""


class ScaleError(ElicitError):
    """Invalid probability scale or unknown verbal expression."""


class TemplateError(ElicitError):
    """Missing or inconsistent fragment template."""


class SessionError(ElicitError):
    """Invalid session mutation or corrupt assessment log."""


class CompileError(SessionError):
    """CPT compilation rejected; carries the full violation list."""

    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class TrendError(ElicitError):
    """Invalid trend request or trend application."""


class InferenceError(ElicitError):
    """Inference failure: bad query, bad evidence, or size guard."""


class ImpossibleEvidenceError(InferenceError):
    """The supplied evidence has probability zero under the network."""
