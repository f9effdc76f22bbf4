import json
from collections.abc import Iterable
from collections.abc import Iterator
from pathlib import Path

from pydantic import ValidationError

from src.core.exceptions import CorpusParseError
from src.core.exceptions import InputFileNotFoundError
from src.schemas.corpus import CorpusRecord


class CorpusRepository:
    """Reads and writes UTF-8 JSON-lines files, one object per line."""

    def __init__(self, path: Path | str):
        self.path = Path(path)

    def read_records(self) -> list[tuple[int, CorpusRecord]]:
        """Validated records paired with their 1-based file line numbers."""
        records: list[tuple[int, CorpusRecord]] = []
        for line_no, line in self._lines():
            try:
                records.append((line_no, CorpusRecord.model_validate_json(line)))
            except ValidationError as exc:
                raise CorpusParseError(self.path, line_no, _first_error(exc)) from exc
        return records

    def read_field(self, field: str, fallback: str | None = None) -> dict[str, str]:
        """
        Map id to the text stored under field (or fallback when absent).

        Used for candidate files, which carry "generated" instead of "summary".
        """
        texts: dict[str, str] = {}
        for line_no, line in self._lines():
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(self.path, line_no, exc.msg) from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
                raise CorpusParseError(self.path, line_no, "missing string field 'id'")
            key = field if field in obj else fallback
            if key is None or not isinstance(obj.get(key), str):
                raise CorpusParseError(self.path, line_no, f"missing string field '{field}'")
            texts[obj["id"]] = obj[key]
        return texts

    def write_lines(self, rows: Iterable[dict[str, str]]) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("w", encoding="utf-8", newline="\n") as handle:
            for row in rows:
                handle.write(json.dumps(row, ensure_ascii=False) + "\n")

    def _lines(self) -> Iterator[tuple[int, str]]:
        if not self.path.is_file():
            raise InputFileNotFoundError(self.path)
        with self.path.open(encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if line.strip():
                    yield line_no, line


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    location = ".".join(str(part) for part in error["loc"])
    return f"{location}: {error['msg']}" if location else error["msg"]
