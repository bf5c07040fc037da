"""Independent reference computations for the test suite.

None of these share code paths with the package under test.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache


def exact_min_bins(voice_n: int, video_n: int, voice_max: int, video_max: int) -> int:
    """Exact minimum unit bins for two item sizes, by exhaustive DP over bin contents."""
    contents = [
        (a, b)
        for a in range(voice_max + 1)
        for b in range(video_max + 1)
        if (a, b) != (0, 0) and Fraction(a, voice_max) + Fraction(b, video_max) <= 1
    ]

    @lru_cache(maxsize=None)
    def best(v: int, w: int) -> int:
        if v == 0 and w == 0:
            return 0
        return 1 + min(best(v - a, w - b) for a, b in contents if a <= v and b <= w)

    return best(voice_n, video_n)


def min_relays_on_grid(length: float, hop: float, grid: int = 60, max_k: int = 6):
    """Smallest relay count k such that some placement on a `grid`-step
    discretization of [0, length] keeps every gap <= hop. Also returns the
    witness placement."""
    points = [length * i / grid for i in range(1, grid)]
    eps = 1e-9
    for k in range(max_k + 1):
        for combo in itertools.combinations(points, k):
            stops = [0.0, *combo, length]
            if all(b - a <= hop + eps for a, b in zip(stops, stops[1:])):
                return k, combo
    return None, None


def cheapest_assignment(relays: dict[str, tuple[float, float]], slots: list[tuple[float, float]]):
    """Exhaustive relay-to-slot assignment minimizing total travel distance."""
    best = None
    for perm in itertools.permutations(sorted(relays), len(slots)):
        cost = sum(math.dist(relays[r], s) for r, s in zip(perm, slots))
        if best is None or cost < best[0] - 1e-12:
            best = (cost, perm)
    return best
