class SpeechPromptError(Exception):
    """
    Base class for every error raised by the workbench.
    Each subclass carries the status code the Workbench reports when a command fails with it.

    Attributes:
        status_code (int): The status code used in the ActionResponse for this error.
    """
    status_code: int = 422


class DimensionError(SpeechPromptError):
    """Raised when tensor shapes or widths do not agree."""


class TargetIndexError(SpeechPromptError):
    """Raised when a cross-entropy target lies outside the logits width."""


class NonScalarLossError(SpeechPromptError):
    """Raised when backward() is called on a value that is not a scalar."""


class NumericalError(SpeechPromptError):
    """Raised when an operation produces NaN or Inf."""


class EmptyInputError(SpeechPromptError):
    """Raised when an operation receives an empty axis or an empty reference."""


class ConfigError(SpeechPromptError):
    """Raised when a configuration value is invalid."""
    status_code = 400


class InsufficientDataError(SpeechPromptError):
    """Raised when there is not enough data to fit a model or draw a sample."""


class VocabularyError(SpeechPromptError):
    """Raised when a unit id falls outside the vocabulary."""


class LengthError(SpeechPromptError):
    """Raised when a sequence would overflow the maximum number of positions."""


class UsageError(SpeechPromptError):
    """Raised when an operation is called on the wrong model variant."""


class CorruptCheckpointError(SpeechPromptError):
    """Raised when a checkpoint container fails magic, version, structure or hash checks."""


class ContractViolationError(SpeechPromptError):
    """Raised when prompt tuning is attempted against a backbone that is not frozen."""


class CapacityError(SpeechPromptError):
    """Raised when more labels are requested than there are usable units."""


class DatasetParseError(SpeechPromptError):
    """
    Raised when a dataset line cannot be parsed.

    Attributes:
        line_number (int): The 1-based line number of the malformed line.
    """
    status_code = 400

    def __init__(self, line_number: int, reason: str) -> None:
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number


class DatasetValidationError(SpeechPromptError):
    """Raised when a dataset does not fit the task or vocabulary it is bound to."""


class BackboneMismatchError(SpeechPromptError):
    """Raised when prompts or batch items refer to a different backbone than the one loaded."""


class MissingArtifactError(SpeechPromptError):
    """Raised when a referenced artifact (checkpoint, dataset, config) does not exist."""
    status_code = 404
