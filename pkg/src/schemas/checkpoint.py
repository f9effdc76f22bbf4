from pydantic import BaseModel
from pydantic import ConfigDict

from src.schemas.model import ModelConfig

CHECKPOINT_FORMAT_VERSION = 1


class ArrayEntry(BaseModel):
    """Location of one parameter array inside the flat binary payload."""

    model_config = ConfigDict(frozen=True)
    name: str
    shape: tuple[int, ...]
    offset: int


class CheckpointManifest(BaseModel):
    """
    JSON manifest stored next to the little-endian float64 payload.

    Attributes:
        format_version (int): Layout version of the payload.
        dtype (str): Numpy dtype string of every array.
        config (ModelConfig): Architecture the arrays belong to.
        arrays (list[ArrayEntry]): Array names, shapes and byte offsets in payload order.
    """

    model_config = ConfigDict(extra="forbid")
    format_version: int = CHECKPOINT_FORMAT_VERSION
    dtype: str = "<f8"
    config: ModelConfig
    arrays: list[ArrayEntry]
