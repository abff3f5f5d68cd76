class EmphiException(Exception):
    """Base class for all EmpHi exceptions."""

    pass


class ConfigError(EmphiException):
    """Raised for unknown config keys, bad values or invalid paths."""


class CorpusError(EmphiException):
    """Raised when an input corpus violates its published layout."""


class VocabularyError(EmphiException):
    """Raised when an id cannot be mapped back to a token."""


class EvaluationError(EmphiException):
    """Raised when a metric is asked to score an empty input."""


class MissingArtifactError(EmphiException):
    """Raised when a stage needs an artifact that has not been produced yet.

    `producer` is the subcommand that writes the missing artifact."""

    def __init__(self, artifact: str, producer: str) -> None:
        super().__init__(f"missing artifact {artifact}; run `emphi {producer}` first")
        self.artifact = artifact
        self.producer = producer


class NonFiniteLossError(EmphiException):
    """Raised when a loss term becomes NaN or infinite. `term` names it."""

    def __init__(self, term: str, value: float) -> None:
        super().__init__(f"loss term {term} is not finite ({value})")
        self.term = term
        self.value = value


class DivergenceError(EmphiException):
    """Raised when training loss runs away from its starting value."""
