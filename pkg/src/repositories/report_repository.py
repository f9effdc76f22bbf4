import csv
import logging
from collections.abc import Iterable
from pathlib import Path

from src.schemas.training import EpochRecord
from src.schemas.training import FewShotRow
from src.schemas.training import SampleDraw

logger = logging.getLogger(__name__)

LOSS_LOG_FILE = "loss_log.csv"
REPORT_FILE = "report.csv"
SAMPLES_FILE = "samples.csv"
RESOLVED_CONFIG_FILE = "resolved.cfg"


class ReportRepository:
    """Writes the CSV artifacts and the resolved config of one run directory."""

    def __init__(self, output_dir: Path | str):
        self.output_dir = Path(output_dir)

    def write_loss_log(self, records: Iterable[EpochRecord]) -> Path:
        rows = (
            {"epoch": r.epoch, "train_loss": repr(r.train_loss), "val_loss": repr(r.val_loss)}
            for r in records
        )
        return self._write_csv(LOSS_LOG_FILE, ["epoch", "train_loss", "val_loss"], rows)

    def write_report(self, rows: Iterable[FewShotRow]) -> Path:
        formatted = (
            {
                "sample_size": row.sample_size,
                "keyword_count": row.keyword_count,
                "rouge1": f"{row.rouge1:.1f}",
                "rouge2": f"{row.rouge2:.1f}",
                "rougeL": f"{row.rougeL:.1f}",
            }
            for row in rows
        )
        return self._write_csv(
            REPORT_FILE,
            ["sample_size", "keyword_count", "rouge1", "rouge2", "rougeL"],
            formatted,
        )

    def write_samples(self, draws: Iterable[SampleDraw]) -> Path:
        rows = (
            {
                "sample_size": d.sample_size,
                "repetition": d.repetition,
                "split": d.split,
                "ids": " ".join(d.ids),
            }
            for d in draws
        )
        return self._write_csv(
            SAMPLES_FILE, ["sample_size", "repetition", "split", "ids"], rows
        )

    def write_resolved_config(self, text: str) -> Path:
        path = self.output_dir / RESOLVED_CONFIG_FILE
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    def _write_csv(
        self, name: str, fieldnames: list[str], rows: Iterable[dict[str, object]]
    ) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / name
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        logger.info("Wrote %s", path)
        return path
