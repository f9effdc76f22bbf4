from pathlib import Path

from src.core.exceptions import DictionaryFormatError
from src.core.exceptions import InputFileNotFoundError


class DictionaryRepository:
    """Background dictionary file: one "word<TAB>count" per line."""

    def __init__(self, path: Path | str):
        self.path = Path(path)

    def read_counts(self) -> dict[str, int]:
        if not self.path.is_file():
            raise InputFileNotFoundError(self.path)
        counts: dict[str, int] = {}
        with self.path.open(encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise DictionaryFormatError(self.path, line_no, "expected word<TAB>count")
                word, count_text = parts
                try:
                    count = int(count_text)
                except ValueError:
                    raise DictionaryFormatError(
                        self.path, line_no, f"count '{count_text}' is not an integer"
                    )
                if count < 1:
                    raise DictionaryFormatError(self.path, line_no, "count must be at least 1")
                if word in counts:
                    raise DictionaryFormatError(self.path, line_no, f"duplicate word '{word}'")
                counts[word] = count
        return counts

    def write_counts(self, counts: dict[str, int]) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("w", encoding="utf-8", newline="\n") as handle:
            for word, count in counts.items():
                handle.write(f"{word}\t{count}\n")
