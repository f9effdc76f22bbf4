import json
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.core.exceptions import CheckpointFormatError
from src.core.exceptions import InputFileNotFoundError
from src.models.params import ModelParams
from src.models.vocabulary import Vocabulary
from src.schemas.checkpoint import ArrayEntry
from src.schemas.checkpoint import CHECKPOINT_FORMAT_VERSION
from src.schemas.checkpoint import CheckpointManifest

logger = logging.getLogger(__name__)

PAYLOAD_FILE = "model.bin"
MANIFEST_FILE = "manifest.json"
VOCAB_FILE = "vocab.json"

_DTYPE = np.dtype("<f8")


class CheckpointRepository:
    """
    A checkpoint directory: flat little-endian float64 payload, JSON manifest
    and the vocabulary the embedding rows refer to.
    """

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)

    def save(self, params: ModelParams, vocab: Vocabulary) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        entries: list[ArrayEntry] = []
        offset = 0
        with (self.directory / PAYLOAD_FILE).open("wb") as handle:
            for name, array in params.items():
                data = np.ascontiguousarray(array, dtype=_DTYPE)
                entries.append(ArrayEntry(name=name, shape=array.shape, offset=offset))
                handle.write(data.tobytes())
                offset += data.nbytes
        manifest = CheckpointManifest(config=params.config, arrays=entries)
        (self.directory / MANIFEST_FILE).write_text(
            manifest.model_dump_json(indent=2) + "\n", encoding="utf-8"
        )
        (self.directory / VOCAB_FILE).write_text(
            json.dumps(list(vocab.id_to_word), ensure_ascii=False) + "\n", encoding="utf-8"
        )
        logger.info("Saved checkpoint (%d parameters) to %s", params.size(), self.directory)

    def load(self) -> tuple[ModelParams, Vocabulary]:
        manifest = self._read_manifest()
        payload_path = self.directory / PAYLOAD_FILE
        if not payload_path.is_file():
            raise InputFileNotFoundError(payload_path)
        payload = payload_path.read_bytes()

        arrays = {}
        for entry in manifest.arrays:
            count = int(np.prod(entry.shape, dtype=np.int64))
            end = entry.offset + count * _DTYPE.itemsize
            if end > len(payload):
                raise CheckpointFormatError(
                    payload_path, f"array '{entry.name}' runs past the end of the payload"
                )
            arrays[entry.name] = (
                np.frombuffer(payload, dtype=_DTYPE, count=count, offset=entry.offset)
                .reshape(entry.shape)
                .astype(np.float64)
            )
        try:
            params = ModelParams(manifest.config, arrays)
        except ValueError as exc:
            raise CheckpointFormatError(self.directory, str(exc)) from exc
        params.check_finite()

        vocab = self._read_vocabulary()
        if len(vocab) != manifest.config.vocab_size:
            raise CheckpointFormatError(
                self.directory,
                f"vocabulary has {len(vocab)} entries, model expects {manifest.config.vocab_size}",
            )
        logger.info("Loaded checkpoint from %s", self.directory)
        return params, vocab

    def _read_manifest(self) -> CheckpointManifest:
        path = self.directory / MANIFEST_FILE
        if not path.is_file():
            raise InputFileNotFoundError(path)
        try:
            manifest = CheckpointManifest.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as exc:
            raise CheckpointFormatError(path, str(exc)) from exc
        if manifest.format_version != CHECKPOINT_FORMAT_VERSION:
            raise CheckpointFormatError(
                path, f"unsupported format version {manifest.format_version}"
            )
        if np.dtype(manifest.dtype) != _DTYPE:
            raise CheckpointFormatError(path, f"unsupported dtype {manifest.dtype}")
        return manifest

    def _read_vocabulary(self) -> Vocabulary:
        path = self.directory / VOCAB_FILE
        if not path.is_file():
            raise InputFileNotFoundError(path)
        try:
            return Vocabulary(id_to_word=tuple(json.loads(path.read_text(encoding="utf-8"))))
        except (ValueError, TypeError) as exc:
            raise CheckpointFormatError(path, str(exc)) from exc
