"""Exact 1-d open-cover certificates on intervals and circles.

Open intervals are merged only where they strictly overlap: (a,b) and (b,c)
do not cover the point b, and catching exactly such gaps is the point of the
certificate.  Generator arcs are shrunk by a conservative slack before
checking, so floating-point endpoint rounding cannot fake coverage.
"""

from __future__ import annotations

from dataclasses import dataclass

Interval = tuple[float, float]


def merge_open(intervals: list[Interval]) -> list[Interval]:
    """Union of open intervals as maximal disjoint opens (strict overlap only)."""
    ivs = sorted((a, b) for a, b in intervals if a < b)
    out: list[Interval] = []
    for a, b in ivs:
        if out and a < out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def closed_complement(lo: float, hi: float, opens: list[Interval]) -> list[Interval]:
    """Closed pieces of [lo, hi] not covered by the union of open intervals.

    Degenerate pieces [x, x] (points between touching opens) are kept: an
    open cover genuinely misses them.
    """
    pieces: list[Interval] = []
    cursor = lo
    for a, b in merge_open(opens):
        if b <= lo or a >= hi:
            # clip: intervals fully outside still matter if straddling ends
            if a >= hi:
                break
            cursor = max(cursor, b)
            continue
        if a >= cursor:
            pieces.append((cursor, min(a, hi)))
        cursor = max(cursor, b)
        if cursor > hi:
            break
    if cursor <= hi:
        pieces.append((cursor, hi))
    return pieces


def covers_closed(merged_opens: list[Interval], piece: Interval) -> bool:
    """True if a single merged open interval strictly contains the closed piece.

    Merged opens are pairwise separated, so this is equivalent to coverage by
    the whole union: a piece meeting two components straddles an uncovered gap.
    """
    u, v = piece
    return any(a < u and v < b for a, b in merged_opens)


def uncovered_pieces(targets: list[Interval], merged_opens: list[Interval]) -> list[Interval]:
    """Precise closed subpieces of the targets missed by the open union."""
    out: list[Interval] = []
    for u, v in targets:
        if covers_closed(merged_opens, (u, v)):
            continue
        out.extend(closed_complement(u, v, merged_opens))
    return out


@dataclass(frozen=True)
class CoverageCertificate:
    """Outcome of the exact cover check; uncovered pieces in chart coordinates."""

    ok: bool
    uncovered: tuple[Interval, ...]
    n_generator_arcs: int
    shrink: float


def line_cover_certificate(window: Interval,
                           generator_arcs: list[tuple[float, float]],
                           guard_arcs: list[tuple[float, float]],
                           shrink: float = 1e-9) -> CoverageCertificate:
    """Check that shrunk generator arcs cover window minus the guards' interiors.

    Arcs are (center, radius) pairs; guards are shrunk too, which enlarges
    the target (conservative in the same direction).
    """
    gens = merge_open([(c - r + shrink, c + r - shrink)
                       for c, r in generator_arcs if r > shrink])
    guards = [(c - r + shrink, c + r - shrink) for c, r in guard_arcs if r > shrink]
    targets = closed_complement(window[0], window[1], guards)
    uncovered = tuple(uncovered_pieces(targets, gens))
    return CoverageCertificate(not uncovered, uncovered, len(generator_arcs), shrink)


def circle_cover_certificate(circumference: float,
                             generator_arcs: list[tuple[float, float]],
                             guard_arcs: list[tuple[float, float]],
                             shrink: float = 1e-9) -> CoverageCertificate:
    """Circle version: rotate the chart so the cut point 0 ~ C sits inside the
    first guard arc, then run the line check; arcs crossing the cut are split.
    """
    if not guard_arcs:
        raise ValueError("circle certificate needs at least one guard arc")
    if guard_arcs[0][1] <= shrink:
        raise ValueError("first guard arc is thinner than the certificate slack")
    c = circumference
    shift = guard_arcs[0][0]

    def split(center: float, radius: float) -> list[Interval]:
        center = (center - shift) % c
        lo, hi = center - radius + shrink, center + radius - shrink
        if lo >= hi:
            return []
        if hi - lo >= c:
            return [(0.0, c)]
        if lo < 0:
            return [(lo + c, c), (0.0, hi)]
        if hi > c:
            return [(lo, c), (0.0, hi - c)]
        return [(lo, hi)]

    gens = merge_open([iv for cr in generator_arcs for iv in split(*cr)])
    guards = [iv for cr in guard_arcs for iv in split(*cr)]
    targets = closed_complement(0.0, c, guards)
    # the cut point 0 ~ C sits strictly inside the first guard arc; the
    # degenerate [0,0] / [C,C] pieces are bookkeeping artifacts of the cut
    targets = [(u, v) for u, v in targets if not (u == v and u in (0.0, c))]
    uncovered = tuple(((u + shift) % c, (v + shift) % c)
                      for u, v in uncovered_pieces(targets, gens))
    return CoverageCertificate(not uncovered, uncovered, len(generator_arcs), shrink)
