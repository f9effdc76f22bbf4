from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import field_validator
from pydantic import StrictStr

from src.models.vocabulary import split_words


class CorpusRecord(BaseModel):
    """
    One raw line of a JSON-lines corpus.

    Attributes:
        id (str): Unique identifier of the record within its corpus.
        document (str): Source text to summarize.
        summary (str): Reference summary.
    """

    model_config = ConfigDict(extra="ignore")
    id: StrictStr
    document: StrictStr
    summary: StrictStr


class Document(BaseModel):
    """
    A corpus record after word splitting.

    Attributes:
        id (str): Unique identifier of the document.
        document (tuple[str, ...]): Normalized word sequence of the source text.
        summary (tuple[str, ...]): Normalized word sequence of the reference summary.
    """

    model_config = ConfigDict(frozen=True)
    id: str
    document: tuple[str, ...]
    summary: tuple[str, ...]

    @field_validator("document", "summary", mode="before")
    @classmethod
    def split_text(cls, value: object) -> object:
        if isinstance(value, str):
            return split_words(value)
        return value

    @field_validator("document")
    @classmethod
    def document_not_empty(cls, value: tuple[str, ...]) -> tuple[str, ...]:
        if not value:
            raise ValueError("document must contain at least one word")
        return value

    @classmethod
    def from_record(cls, record: CorpusRecord) -> "Document":
        return cls(id=record.id, document=record.document, summary=record.summary)
