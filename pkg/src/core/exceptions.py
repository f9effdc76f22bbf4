from pathlib import Path


class SummarizerError(Exception):
    """Base class for every domain error raised by the pipeline."""


# --- EXCEPTIONS FOR CORPUS AND FILES ---
class InputFileNotFoundError(SummarizerError):
    """Raised when a corpus, dictionary, checkpoint or config path does not exist."""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        super().__init__(f"Input file not found: {self.path}")


class CorpusParseError(SummarizerError):
    """
    Raised when a line of a JSON-lines corpus cannot be decoded or does not
    carry the string fields id, document and summary.
    """

    def __init__(self, path: Path | str, line: int, reason: str):
        self.path = Path(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}:{line}: {reason}")


class DuplicateDocumentError(SummarizerError):
    """Raised when two records of one corpus share the same id."""

    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"Document id '{doc_id}' appears more than once in the corpus.")


class DictionaryFormatError(SummarizerError):
    """Raised when a background dictionary line is malformed or repeats a word."""

    def __init__(self, path: Path | str, line: int, reason: str):
        self.path = Path(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}:{line}: {reason}")


class VocabularySizeError(SummarizerError):
    """Raised when the requested vocabulary cannot even hold the special tokens."""

    def __init__(self, max_size: int, minimum: int):
        self.max_size = max_size
        self.minimum = minimum
        super().__init__(
            f"Vocabulary size {max_size} is smaller than the {minimum} reserved special tokens."
        )


class MissingDictionaryError(SummarizerError):
    """Raised when TF-IDF or oracle keywords are requested without a background dictionary."""

    def __init__(self, source: str):
        self.source = source
        super().__init__(f"Keyword source '{source}' needs a background dictionary.")


# --- EXCEPTIONS FOR ATTENTION PATTERNS ---
class GlobalIndexOutOfRangeError(SummarizerError):
    """Raised when a global token index does not address a position of the sequence."""

    def __init__(self, index: int, n: int):
        self.index = index
        self.n = n
        super().__init__(f"Global index {index} is outside a sequence of length {n}.")


# --- EXCEPTIONS FOR THE MODEL ---
class SequenceTooLongError(SummarizerError):
    """Raised when an input is longer than the learned position table."""

    def __init__(self, length: int, max_positions: int):
        self.length = length
        self.max_positions = max_positions
        super().__init__(
            f"Sequence of length {length} exceeds max_positions={max_positions}."
        )


class EmptyPrefixError(SummarizerError):
    """Raised when the decoder is asked to run on an empty target prefix."""

    def __init__(self, message: str = "Decoder prefix must contain at least BOS.") -> None:
        self.message = message
        super().__init__(self.message)


class AllPaddingError(SummarizerError):
    """Raised when every target position of a loss computation is padding."""

    def __init__(self, message: str = "Cannot compute a loss over padding only.") -> None:
        self.message = message
        super().__init__(self.message)


class AttentionContractError(SummarizerError):
    """Raised when some query row has no key it is allowed to attend to."""

    def __init__(self, rows: list[int]):
        self.rows = rows
        super().__init__(f"Query rows {rows} have no allowed keys.")


class NonFiniteParameterError(SummarizerError):
    """Raised when a parameter array contains NaN or Inf."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Parameter '{name}' contains non-finite values.")


class CheckpointFormatError(SummarizerError):
    """Raised when a checkpoint manifest and its binary payload disagree."""

    def __init__(self, path: Path | str, reason: str):
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"Invalid checkpoint at {self.path}: {reason}")


# --- EXCEPTIONS FOR TRAINING ---
class NonFiniteGradientError(SummarizerError):
    """Raised when an optimizer step receives a NaN or Inf gradient."""

    def __init__(self, group: str):
        self.group = group
        super().__init__(f"Non-finite gradient in parameter group '{group}'; step aborted.")


class EmptyTrainingSetError(SummarizerError):
    """Raised when training is requested without any training example."""

    def __init__(self, message: str = "Training set is empty.") -> None:
        self.message = message
        super().__init__(self.message)


class EmptyValidationSetError(SummarizerError):
    """Raised when model selection is requested without any validation example."""

    def __init__(self, message: str = "Validation set is empty.") -> None:
        self.message = message
        super().__init__(self.message)


# --- EXCEPTIONS FOR METRICS ---
class EmptyPairsError(SummarizerError):
    """Raised when corpus-level ROUGE is asked for zero candidate/reference pairs."""

    def __init__(self, message: str = "At least one candidate/reference pair is required.") -> None:
        self.message = message
        super().__init__(self.message)


class MissingCandidateError(SummarizerError):
    """Raised when a reference id has no candidate to score against."""

    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"No candidate summary for reference id '{doc_id}'.")
