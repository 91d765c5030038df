"""Representative time-of-day intervals for recurring patterns.

Instance intervals are grouped by transitive overlap on the 24h circle
(the axis is rotated so the cut falls in the largest uncovered gap, which
keeps midnight-crossing habits in one group), then each group is summarized
by the median start/end, a majority location and an occurrence probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import DataError

MINUTES_PER_DAY = 1440


def minutes_to_hhmm(m: int) -> str:
    m = int(m) % MINUTES_PER_DAY
    return f"{m // 60:02d}:{m % 60:02d}"


def interval_dissimilarity(a: Tuple[float, float], b: Tuple[float, float]) -> float:
    """L1 distance between two intervals: |Δstart| + |Δend|."""
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def representative_of_group(starts: Sequence[float], ends: Sequence[float]) -> Tuple[float, float]:
    """The (start, end) minimizing total L1 dissimilarity to the group."""
    return lower_median(starts), lower_median(ends)


def total_dissimilarity(candidate: Tuple[float, float],
                        intervals: Sequence[Tuple[float, float]]) -> float:
    return sum(interval_dissimilarity(candidate, iv) for iv in intervals)


def median_optimality_check(
    starts: Sequence[float],
    ends: Sequence[float],
    candidate: Optional[Tuple[float, float]] = None,
) -> bool:
    """True iff candidate beats every grid point of observed starts x ends."""
    if not starts:
        raise DataError("empty group")
    if candidate is None:
        candidate = representative_of_group(starts, ends)
    intervals = list(zip(starts, ends))
    best = min(
        total_dissimilarity((s, e), intervals) for s in set(starts) for e in set(ends)
    )
    return total_dissimilarity(candidate, intervals) <= best


@dataclass(frozen=True)
class RepresentativeInterval:
    start: int  # minutes of day
    end: int    # start + duration; exceeds 1439 when crossing midnight
    location: str
    probability: float
    tolerance: float
    support_count: int
    total_count: int

    @property
    def start_hhmm(self) -> str:
        return minutes_to_hhmm(self.start)

    @property
    def end_hhmm(self) -> str:
        return minutes_to_hhmm(self.end)


def _coverage_gaps(arcs) -> list:
    """Uncovered gaps (start, length) of circular arcs on [0, 1440)."""
    covered = []
    for s, dur in arcs:
        if dur >= MINUTES_PER_DAY:
            return []
        s %= MINUTES_PER_DAY
        if s + dur <= MINUTES_PER_DAY:
            covered.append((s, s + dur))
        else:
            covered.append((s, MINUTES_PER_DAY))
            covered.append((0, (s + dur) % MINUTES_PER_DAY))
    covered.sort()
    merged = [list(covered[0])]
    for s, e in covered[1:]:
        if s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    gaps = []
    for (s1, e1), (s2, _) in zip(merged, merged[1:]):
        gaps.append((e1, s2 - e1))
    wrap = (MINUTES_PER_DAY - merged[-1][1]) + merged[0][0]
    if wrap > 0:
        gaps.append((merged[-1][1] % MINUTES_PER_DAY, wrap))
    return [g for g in gaps if g[1] > 0]


def _rotation_cut(arcs) -> int:
    gaps = _coverage_gaps(arcs)
    if not gaps:
        return 0
    start, length = max(gaps, key=lambda g: (g[1], -g[0]))
    return (start + length // 2) % MINUTES_PER_DAY


def representative_intervals(
    instances: Sequence[Tuple[float, float, str]],
    zeta: float = 120,
    min_p: float = 0.25,
) -> list:
    """Summarize (start minute, end minute, region) instances.

    Groups instances by transitive overlap of their time-of-day intervals,
    takes per-group median start/end, counts the group's instances within
    tolerance zeta of that representative, and keeps groups whose share of
    all instances reaches min_p. Results are sorted by start.
    """
    if not instances:
        raise DataError("no instances to summarize")
    total = len(instances)

    arcs = []
    for s, e, _ in instances:
        if e < s:
            raise DataError(f"instance interval ends before it starts: ({s}, {e})")
        arcs.append((int(s) % MINUTES_PER_DAY, int(e - s)))
    cut = _rotation_cut(arcs)

    rotated = sorted(
        (
            ((int(s) % MINUTES_PER_DAY - cut) % MINUTES_PER_DAY, region, int(e - s))
            for s, e, region in instances
        ),
        key=lambda t: (t[0], t[0] + t[2], t[1]),
    )

    groups: list = []
    current: list = []
    reach = None
    for rs, region, dur in rotated:
        if current and rs > reach:
            groups.append(current)
            current = []
            reach = None
        current.append((rs, rs + dur, region))
        reach = rs + dur if reach is None else max(reach, rs + dur)
    if current:
        groups.append(current)

    out = []
    for group in groups:
        starts = [s for s, _, _ in group]
        ends = [e for _, e, _ in group]
        rep = representative_of_group(starts, ends)
        num = sum(
            1 for s, e, _ in group if interval_dissimilarity(rep, (s, e)) <= zeta
        )
        p = num / total
        if p < min_p:
            continue
        tally: dict = {}
        for _, _, region in group:
            tally[region] = tally.get(region, 0) + 1
        location = min(tally, key=lambda r: (-tally[r], r))
        start = (int(rep[0]) + cut) % MINUTES_PER_DAY
        out.append(
            RepresentativeInterval(
                start=start,
                end=start + int(rep[1] - rep[0]),
                location=location,
                probability=p,
                tolerance=zeta,
                support_count=num,
                total_count=total,
            )
        )
    out.sort(key=lambda r: (r.start, r.end, r.location))
    return out
