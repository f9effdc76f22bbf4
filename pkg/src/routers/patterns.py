from pathlib import Path
from typing import Annotated

import numpy as np
import typer

from src.core.config import load_config
from src.core.seeding import derive_seed
from src.dependencies import Config_file
from src.dependencies import get_report_repository
from src.dependencies import Seed
from src.models.attention_pattern import PatternKind
from src.services.attention.service import build_pattern
from src.services.attention.service import export_mask
from src.services.attention.service import pair_count
from src.services.attention.service import reachability
from src.services.attention.service import UNREACHABLE

router = typer.Typer()


def parse_indices(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    return tuple(int(part) for part in text.split(",") if part.strip())


@router.command("pattern")
def pattern(
    config_file: Config_file = None,
    kind: Annotated[PatternKind | None, typer.Option("--kind")] = None,
    n: Annotated[int | None, typer.Option("--n", min=1)] = None,
    half_width: Annotated[int | None, typer.Option("--half-width", min=0)] = None,
    dilation: Annotated[int | None, typer.Option("--dilation", min=1)] = None,
    globals_: Annotated[
        str | None, typer.Option("--globals", help="Comma-separated global indices (egad).")
    ] = None,
    random_count: Annotated[
        int | None, typer.Option("--random-globals", min=0, help="Random globals (bigbird).")
    ] = None,
    seed: Seed = None,
    layers: Annotated[
        int | None, typer.Option("--layers", min=0, help="Report reachability within L layers.")
    ] = None,
    out: Annotated[Path | None, typer.Option("--out", help="PGM image of the mask.")] = None,
) -> None:
    """
    Build an encoder attention pattern, print its pair count and optionally
    export it as an image next to the resolved config.
    """
    config = load_config(
        config_file,
        pattern_kind=kind,
        pattern_length=n,
        half_width=half_width,
        dilation=dilation,
        pattern_globals=parse_indices(globals_),
        random_globals=random_count,
        seed=seed,
        reachability_layers=layers,
        output_dir=out.parent if out is not None else None,
    ).resolved()
    built = build_pattern(
        config.pattern_kind,
        config.pattern_length,
        half_width=config.half_width or 0,
        dilation=config.dilation or 1,
        globals_=config.pattern_globals,
        random_count=config.random_globals,
        seed=derive_seed(config.seed, "bigbird"),
    )
    size = config.pattern_length
    typer.echo(f"pairs\t{pair_count(built)}")
    typer.echo(f"density\t{pair_count(built) / size**2:.4f}")
    if config.reachability_layers is not None:
        steps = config.reachability_layers
        hops = reachability(built, steps)
        reachable = hops != UNREACHABLE
        typer.echo(f"reachable_within_{steps}\t{int(reachable.sum())}")
        typer.echo(f"max_hops\t{int(hops[reachable].max()) if reachable.any() else 0}")
        typer.echo(f"unreachable_pairs\t{int(np.count_nonzero(~reachable))}")
    if out is not None:
        export_mask(built, out)
        get_report_repository(config.output_dir).write_resolved_config(config.render())
