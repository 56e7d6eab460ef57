"""Streamline selection: containment test and angular filtering.

Selection is whole-line: a line is either entirely selected or not. The
selection buffer is indexed by line order and carries the seed ids so the
flags can be reported per seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Ball, Disk
from .scene import StreamlineSet


@dataclass(frozen=True)
class SelectionBuffer:
    """Per-streamline binary selection flags, aligned with line order."""

    seed_ids: np.ndarray  # (L,) int64
    flags: np.ndarray  # (L,) bool

    def __post_init__(self):
        if len(self.seed_ids) != len(self.flags):
            raise ValueError("flag count must match line count")

    def selected_seed_ids(self) -> list[int]:
        """Selected seed ids, ascending and duplicate-free."""
        return sorted(int(s) for s in self.seed_ids[self.flags])

    @property
    def count(self) -> int:
        return int(self.flags.sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SelectionBuffer)
            and np.array_equal(self.seed_ids, other.seed_ids)
            and np.array_equal(self.flags, other.flags)
        )


def _segment_arrays(lines: StreamlineSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All polyline segments as (starts, ends, owning line index)."""
    starts = lines.points[:-1]
    ends = lines.points[1:]
    # drop the fake segment joining consecutive polylines
    keep = np.ones(len(starts), dtype=bool)
    keep[lines.offsets[1:-1] - 1] = False
    seg_line = np.repeat(np.arange(lines.line_count), np.diff(lines.offsets) - 1)
    return starts[keep], ends[keep], seg_line


def select_containment(lines: StreamlineSet, ball: Ball) -> SelectionBuffer:
    """Select every line with at least one segment intersecting the ball.

    Exact closed-form closest-point test per segment, no sampling.
    """
    flags = np.zeros(lines.line_count, dtype=bool)
    if lines.line_count:
        a, b, seg_line = _segment_arrays(lines)
        d = b - a
        ac = ball.center - a
        dd = np.einsum("ij,ij->i", d, d)
        t = np.clip(np.einsum("ij,ij->i", ac, d) / np.maximum(dd, 1e-30), 0.0, 1.0)
        t[dd < 1e-30] = 0.0
        closest = a + t[:, None] * d - ball.center
        hit = np.einsum("ij,ij->i", closest, closest) <= ball.radius * ball.radius
        np.logical_or.at(flags, seg_line[hit], True)
    return SelectionBuffer(lines.seed_ids.copy(), flags)


def _inball_tangent_sums(lines: StreamlineSet, ball: Ball) -> tuple[np.ndarray, np.ndarray]:
    """Per-line sum of segment directions weighted by in-ball arc length.

    Returns (sums (L,3), weights (L,)). A line with zero weight has no
    portion inside the ball.
    """
    sums = np.zeros((lines.line_count, 3))
    weights = np.zeros(lines.line_count)
    if lines.line_count == 0:
        return sums, weights
    a, b, seg_line = _segment_arrays(lines)
    d = b - a
    seg_len = np.linalg.norm(d, axis=1)
    ok = seg_len > 1e-30
    # clip each segment parameter interval to the ball: |a + t d - c| <= r
    ac = a - ball.center
    A = np.einsum("ij,ij->i", d, d)
    B = 2.0 * np.einsum("ij,ij->i", d, ac)
    C = np.einsum("ij,ij->i", ac, ac) - ball.radius**2
    disc = B * B - 4.0 * A * C
    has = ok & (disc > 0.0)
    sq = np.sqrt(np.maximum(disc, 0.0))
    denom = np.maximum(2.0 * A, 1e-30)
    t0 = np.clip((-B - sq) / denom, 0.0, 1.0)
    t1 = np.clip((-B + sq) / denom, 0.0, 1.0)
    w = np.where(has, (t1 - t0) * seg_len, 0.0)
    dirs = np.zeros_like(d)
    dirs[ok] = d[ok] / seg_len[ok, None]
    np.add.at(sums, seg_line, dirs * w[:, None])
    np.add.at(weights, seg_line, w)
    return sums, weights


def mean_tangent(line: np.ndarray, ball: Ball) -> np.ndarray | None:
    """Arc-length-weighted mean direction of a polyline's in-ball portion.

    Normalized sum of segment directions weighted by the segment arc length
    inside the ball; None when nothing lies inside.
    """
    single = StreamlineSet.from_lines([np.asarray(line, dtype=np.float64)])
    sums, weights = _inball_tangent_sums(single, ball)
    if weights[0] <= 1e-30:
        return None
    n = np.linalg.norm(sums[0])
    if n < 1e-30:
        return None
    return sums[0] / n


def select_angular(
    lines: StreamlineSet, base: SelectionBuffer, disk: Disk, tol_deg: float
) -> SelectionBuffer:
    """Keep base-selected lines whose mean in-ball tangent is aligned with
    the disk normal within *tol_deg* (inclusive).

    Alignment is signed: lines running opposite to the normal are rejected.
    """
    if not (0.0 < tol_deg <= 90.0):
        raise ValueError("tolerance must be in (0, 90] degrees")
    ball = Ball(disk.center, disk.radius)
    sums, weights = _inball_tangent_sums(lines, ball)
    norms = np.linalg.norm(sums, axis=1)
    exists = (weights > 1e-30) & (norms > 1e-30)
    cos_angle = np.zeros(lines.line_count)
    cos_angle[exists] = (sums[exists] @ disk.normal) / norms[exists]
    cos_tol = np.cos(np.deg2rad(tol_deg))
    aligned = exists & (cos_angle >= cos_tol - 1e-12)
    return SelectionBuffer(base.seed_ids.copy(), base.flags & aligned)
