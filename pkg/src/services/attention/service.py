import logging
from collections.abc import Iterable
from pathlib import Path

import numpy as np
import numpy.typing as npt
from scipy.sparse.csgraph import shortest_path

from src.models.attention_pattern import AttentionPattern
from src.models.attention_pattern import PatternKind

logger = logging.getLogger(__name__)

UNREACHABLE = -1

_PGM_ATTENDED = 0
_PGM_SKIPPED = 255


def build_pattern(
    kind: PatternKind,
    n: int,
    half_width: int = 0,
    dilation: int = 1,
    globals_: Iterable[int] = (),
    random_count: int = 0,
    seed: int = 0,
) -> AttentionPattern:
    """
    Construct one of the encoder sparsity families.

    full attends every pair; window keeps the dilated band only; longformer
    adds index 0 as global; bigbird adds random_count seeded random globals;
    egad adds the caller's globals (the prefixed task and keyword tokens).
    """
    match kind:
        case PatternKind.full:
            return AttentionPattern(kind=kind, n=n)
        case PatternKind.window:
            return AttentionPattern(kind=kind, n=n, half_width=half_width, dilation=dilation)
        case PatternKind.longformer:
            return AttentionPattern(
                kind=kind, n=n, half_width=half_width, dilation=dilation, globals=frozenset({0})
            )
        case PatternKind.bigbird:
            rng = np.random.default_rng(seed)
            drawn = rng.choice(n, size=min(random_count, n), replace=False)
            return AttentionPattern(
                kind=kind,
                n=n,
                half_width=half_width,
                dilation=dilation,
                globals=frozenset(int(i) for i in drawn),
                random_globals=(random_count, seed),
            )
        case PatternKind.egad:
            return AttentionPattern(
                kind=kind,
                n=n,
                half_width=half_width,
                dilation=dilation,
                globals=frozenset(int(i) for i in globals_),
            )
    raise ValueError(f"unknown pattern kind {kind!r}")


def pair_count(pattern: AttentionPattern) -> int:
    return pattern.pair_count()


def reachability(pattern: AttentionPattern, layers: int) -> npt.NDArray[np.int64]:
    """
    Minimum attention steps for position j to influence position i.

    Entry (i, j) is the hop count along edges i <- j (i attends to j), or
    UNREACHABLE when more than `layers` steps would be needed.
    """
    if layers < 0:
        raise ValueError(f"layers must be non-negative, got {layers}")
    # Edge j -> i carries information when query i attends to key j.
    graph = pattern.mask.T.astype(np.float64)
    hops = shortest_path(graph, method="D", directed=True, unweighted=True).T
    result = np.full(hops.shape, UNREACHABLE, dtype=np.int64)
    within = np.isfinite(hops) & (hops <= layers)
    result[within] = hops[within].astype(np.int64)
    return result


def render_pgm(pattern: AttentionPattern) -> str:
    """ASCII P2 image of the mask: attended cells 0, others 255, row i = query i."""
    pixels = np.where(pattern.mask, _PGM_ATTENDED, _PGM_SKIPPED)
    rows = "\n".join(" ".join(str(v) for v in row) for row in pixels)
    return f"P2\n{pattern.n} {pattern.n}\n255\n{rows}\n"


def export_mask(pattern: AttentionPattern, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_pgm(pattern), encoding="ascii")
    logger.info("Wrote %dx%d mask image to %s", pattern.n, pattern.n, path)
    return path
