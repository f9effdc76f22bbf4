import logging
import re
import time
from collections import defaultdict
from pathlib import Path

import pytest

from scripts.make_synthetic_corpus import write_synthetic_corpus
from src.main import run_subcommand

DOCUMENT_COUNT = 300
TIME_LIMIT_SECONDS = 30 * 60

_TRAIN_IDS = re.compile(
    r"sample_size=(\d+) keywords=(\d+) repetition=(\d+) train ids: (.*)"
)


def protocol_config(tmp_path: Path) -> Path:
    paths = write_synthetic_corpus(tmp_path / "corpus", count=DOCUMENT_COUNT, seed=0)
    path = tmp_path / "protocol.cfg"
    path.write_text(
        f"train_corpus = {paths['train']}\n"
        f"validation_corpus = {paths['validation']}\n"
        f"background_dictionary = {paths['dictionary']}\n"
        "model_preset = toy\n"
        "sample_sizes = [0, 10, 100]\n"
        "keyword_counts = [0, 10, 20]\n"
        "repetitions = 5\n"
        "epochs = 5\n"
        "num_beams = 2\n"
        "max_length = 12\n"
        "max_summary_length = 16\n",
        encoding="utf-8",
    )
    return path


@pytest.mark.slow
def test_fewshot_protocol(tmp_path, caplog):
    """Full protocol twice: complete report, shared draws, byte-identical output."""
    config = protocol_config(tmp_path)
    outputs = []
    start_time = time.perf_counter()
    with caplog.at_level(logging.INFO, logger="src.services.experiments.service"):
        for name in ("first", "second"):
            out = tmp_path / name
            assert run_subcommand(["fewshot", "--config", str(config), "--out", str(out)]) == 0
            outputs.append(out)
    elapsed = time.perf_counter() - start_time
    print(f"\nTwo protocol runs took {elapsed:.1f} s")
    assert elapsed < 2 * TIME_LIMIT_SECONDS

    report = (outputs[0] / "report.csv").read_text(encoding="utf-8").splitlines()
    cells = [tuple(line.split(",")[:2]) for line in report[1:]]
    assert cells == [(s, k) for s in ("0", "10", "100") for k in ("0", "10", "20")]

    for name in ("report.csv", "samples.csv"):
        assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()

    # Every keyword configuration trains on the same ids for a given (size, repetition).
    logged: dict[tuple[str, str], set[str]] = defaultdict(set)
    for record in caplog.records:
        match = _TRAIN_IDS.fullmatch(record.getMessage())
        if match:
            sample_size, _, repetition, ids = match.groups()
            logged[(sample_size, repetition)].add(ids)
    assert len(logged) == 3 * 5
    assert all(len(ids) == 1 for ids in logged.values())
