import math
from collections import deque

import numpy as np
import pytest

from src.core.exceptions import GlobalIndexOutOfRangeError
from src.models.attention_pattern import AttentionPattern
from src.models.attention_pattern import PatternKind
from src.services.attention.service import build_pattern
from src.services.attention.service import export_mask
from src.services.attention.service import pair_count
from src.services.attention.service import reachability
from src.services.attention.service import render_pgm
from src.services.attention.service import UNREACHABLE


def bfs_hops(pattern: AttentionPattern) -> np.ndarray:
    """Breadth-first min-hop table over edges i <- j, -1 when unreachable."""
    n = pattern.n
    hops = np.full((n, n), -1, dtype=np.int64)
    for source in range(n):
        hops[source, source] = 0
        queue = deque([source])
        while queue:
            j = queue.popleft()
            for i in range(n):
                if hops[i, source] == -1 and pattern.is_attended(i, j):
                    hops[i, source] = hops[j, source] + 1
                    queue.append(i)
    return hops


class TestBuildPattern:
    """Tests for the encoder sparsity families."""

    def test_window(self):
        pattern = build_pattern(PatternKind.window, 5, half_width=1)
        assert pattern.is_attended(2, 3)
        assert not pattern.is_attended(0, 4)

    def test_longformer_global_row_and_column(self):
        pattern = build_pattern(PatternKind.longformer, 5, half_width=1)
        assert pattern.is_attended(0, 4)
        assert pattern.is_attended(4, 0)

    def test_dilation(self):
        """A dilated window skips odd offsets."""
        pattern = build_pattern(PatternKind.window, 9, half_width=2, dilation=2)
        assert pattern.is_attended(4, 0)
        assert pattern.is_attended(4, 6)
        assert not pattern.is_attended(4, 5)

    def test_mask_matches_predicate(self, rng):
        """The dense mask agrees with is_attended on every pair."""
        for kind in PatternKind:
            n = int(rng.integers(1, 15))
            globals_ = {int(i) for i in np.flatnonzero(rng.random(n) < 0.2)}
            pattern = build_pattern(
                kind,
                n,
                half_width=int(rng.integers(0, 4)),
                dilation=int(rng.integers(1, 3)),
                globals_=globals_,
                random_count=2,
                seed=5,
            )
            expected = [[pattern.is_attended(i, j) for j in range(n)] for i in range(n)]
            np.testing.assert_array_equal(pattern.mask, np.array(expected))

    def test_bigbird_reproducible(self):
        """Same seed, same random globals; they stay inside the sequence."""
        first = build_pattern(PatternKind.bigbird, 20, half_width=1, random_count=3, seed=8)
        second = build_pattern(PatternKind.bigbird, 20, half_width=1, random_count=3, seed=8)
        assert first.globals == second.globals
        assert len(first.globals) == 3
        assert all(0 <= g < 20 for g in first.globals)

    def test_bigbird_count_capped(self):
        """Asking for more random globals than positions makes everything global."""
        pattern = build_pattern(PatternKind.bigbird, 4, random_count=10, seed=0)
        assert pattern.globals == {0, 1, 2, 3}

    def test_global_out_of_range(self):
        with pytest.raises(GlobalIndexOutOfRangeError):
            build_pattern(PatternKind.egad, 6, half_width=1, globals_={6})

    def test_adding_globals_is_monotone(self, rng):
        """A global index never removes an attended pair."""
        base = build_pattern(PatternKind.egad, 12, half_width=2, globals_={0})
        extended = build_pattern(PatternKind.egad, 12, half_width=2, globals_={0, 5, 9})
        assert np.all(extended.mask[base.mask])


class TestPairCount:
    """Tests for attended-pair counting."""

    def test_full(self):
        assert pair_count(build_pattern(PatternKind.full, 8)) == 64

    def test_diagonal(self):
        assert pair_count(build_pattern(PatternKind.window, 8, half_width=0)) == 8

    def test_egad_hand_count(self):
        """16 window pairs plus 8 global pairs."""
        assert pair_count(build_pattern(PatternKind.egad, 6, half_width=1, globals_={0})) == 24

    def test_bounds(self, rng):
        """n <= pair_count <= n^2 for every family."""
        for kind in PatternKind:
            n = int(rng.integers(1, 20))
            count = pair_count(build_pattern(kind, n, half_width=1, random_count=2))
            assert n <= count <= n * n


class TestReachability:
    """Tests for multi-layer receptive fields."""

    def test_window_hand_example(self):
        """Three hops from position 3 to position 0 with h=1."""
        pattern = build_pattern(PatternKind.window, 10, half_width=1)
        assert reachability(pattern, 3)[0, 3] == 3
        assert reachability(pattern, 2)[0, 3] == UNREACHABLE

    def test_diagonal_is_zero(self):
        pattern = build_pattern(PatternKind.window, 7, half_width=0)
        hops = reachability(pattern, 0)
        assert np.all(np.diag(hops) == 0)
        assert np.all(hops[~np.eye(7, dtype=bool)] == UNREACHABLE)

    def test_window_bound_matches_bfs(self):
        """Without globals, hops equal ceil(|i - j| / h), checked against BFS."""
        for n in range(1, 33):
            for h in range(1, 5):
                pattern = build_pattern(PatternKind.window, n, half_width=h)
                hops = reachability(pattern, n)
                np.testing.assert_array_equal(hops, bfs_hops(pattern))
                i, j = np.indices((n, n))
                expected = np.vectorize(lambda a, b: math.ceil(abs(a - b) / h))(i, j)
                np.testing.assert_array_equal(hops, expected)

    def test_global_gives_two_hops(self, rng):
        """Any pattern with a global index connects every pair within two steps."""
        for _ in range(20):
            n = int(rng.integers(2, 25))
            g = int(rng.integers(0, n))
            pattern = build_pattern(PatternKind.egad, n, half_width=int(rng.integers(0, 3)), globals_={g})
            hops = reachability(pattern, 2)
            assert np.all(hops != UNREACHABLE)
            assert hops.max() <= 2

    def test_random_patterns_match_bfs(self, rng):
        """Dilated, global and random patterns agree with the BFS oracle."""
        for kind in PatternKind:
            n = int(rng.integers(1, 20))
            pattern = build_pattern(
                kind, n, half_width=int(rng.integers(0, 3)), dilation=int(rng.integers(1, 4)),
                random_count=1, seed=int(rng.integers(0, 100)),
            )
            np.testing.assert_array_equal(reachability(pattern, n), bfs_hops(pattern))

    def test_negative_layers(self):
        with pytest.raises(ValueError):
            reachability(build_pattern(PatternKind.full, 3), -1)


class TestExportMask:
    """Tests for the PGM rendering."""

    def test_full(self):
        assert render_pgm(build_pattern(PatternKind.full, 2)) == "P2\n2 2\n255\n0 0\n0 0\n"

    def test_diagonal(self):
        text = render_pgm(build_pattern(PatternKind.window, 3, half_width=0))
        assert text.splitlines()[3:] == ["0 255 255", "255 0 255", "255 255 0"]

    def test_file_is_deterministic(self, tmp_path):
        pattern = build_pattern(PatternKind.egad, 6, half_width=1, globals_={0})
        first = export_mask(pattern, tmp_path / "a.pgm").read_bytes()
        second = export_mask(pattern, tmp_path / "b.pgm").read_bytes()
        assert first == second
        assert first.split(b"\n", 3)[3].split().count(b"0") == 24
