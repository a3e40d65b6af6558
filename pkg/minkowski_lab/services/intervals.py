"""Exact finite unions of intervals and points on the real line.

A set is stored as sorted finite breakpoints b_0 < ... < b_{k-1} plus the
membership of every breakpoint and of the k+1 open gaps between them
(gap 0 is (-inf, b_0), gap k is (b_{k-1}, inf)). Every boolean operation
merges breakpoints and evaluates the operands piece by piece, so results
are exact; measures are sums of gap lengths and may be infinite.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from minkowski_lab.utils.exceptions import InfiniteComponentsError

Component = tuple[float, float, bool, bool]


@dataclass(frozen=True)
class IntervalSet:
    breakpoints: tuple[float, ...] = ()
    points_in: tuple[bool, ...] = ()
    gaps_in: tuple[bool, ...] = (False,)

    # construction

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls()

    @classmethod
    def whole(cls) -> "IntervalSet":
        return cls((), (), (True,))

    @classmethod
    def interval(
        cls, lo: float, hi: float, closed_lo: bool = True, closed_hi: bool = True
    ) -> "IntervalSet":
        """
        Builds a single interval; infinite ends are always open.

        Args:
            lo: Left end, may be -inf.
            hi: Right end, may be +inf.
            closed_lo: Whether lo belongs to the set.
            closed_hi: Whether hi belongs to the set.

        Returns:
            IntervalSet: The interval.

        Raises:
            InfiniteComponentsError: If an end is NaN.
        """

        if math.isnan(lo) or math.isnan(hi):
            raise InfiniteComponentsError()
        if lo > hi or (lo == hi and not (closed_lo and closed_hi)):
            return cls.empty()
        if lo == hi:
            return cls((lo,), (True,), (False, False))

        breakpoints: list[float] = []
        points: list[bool] = []
        gaps = [math.isinf(lo)]
        if not math.isinf(lo):
            breakpoints.append(lo)
            points.append(closed_lo)
            gaps.append(True)
        if not math.isinf(hi):
            breakpoints.append(hi)
            points.append(closed_hi)
            gaps.append(False)
        return cls(tuple(breakpoints), tuple(points), tuple(gaps))._normalized()

    @classmethod
    def points(cls, values: Iterable[float]) -> "IntervalSet":
        result = cls.empty()
        for value in values:
            result = result | cls.interval(value, value)
        return result

    @classmethod
    def from_components(cls, components: Iterable[Component]) -> "IntervalSet":
        result = cls.empty()
        for lo, hi, closed_lo, closed_hi in components:
            result = result | cls.interval(lo, hi, closed_lo, closed_hi)
        return result

    # evaluation

    def contains(self, value: float) -> bool:
        index = int(np.searchsorted(self.breakpoints, value))
        if index < len(self.breakpoints) and self.breakpoints[index] == value:
            return self.points_in[index]
        return self.gaps_in[index]

    def _normalized(self) -> "IntervalSet":
        breakpoints, points, gaps = [], [], [self.gaps_in[0]]
        for index, point in enumerate(self.breakpoints):
            right = self.gaps_in[index + 1]
            if gaps[-1] == self.points_in[index] == right:
                continue
            breakpoints.append(point)
            points.append(self.points_in[index])
            gaps.append(right)
        return IntervalSet(tuple(breakpoints), tuple(points), tuple(gaps))

    def _combine(
        self, other: "IntervalSet", rule: Callable[[bool, bool], bool]
    ) -> "IntervalSet":
        merged = tuple(sorted(set(self.breakpoints) | set(other.breakpoints)))
        samples = _gap_samples(merged)
        gaps = tuple(rule(self.contains(x), other.contains(x)) for x in samples)
        points = tuple(rule(self.contains(x), other.contains(x)) for x in merged)
        return IntervalSet(merged, points, gaps)._normalized()

    # boolean algebra

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        return self._combine(other, lambda a, b: a and b)

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        return self._combine(other, lambda a, b: a and not b)

    def __invert__(self) -> "IntervalSet":
        return IntervalSet(
            self.breakpoints,
            tuple(not p for p in self.points_in),
            tuple(not g for g in self.gaps_in),
        )

    def complement(self) -> "IntervalSet":
        return ~self

    # topology and densities

    def _with_points(self, rule: Callable[[bool, bool, bool], bool]) -> "IntervalSet":
        points = tuple(
            rule(self.gaps_in[i], self.points_in[i], self.gaps_in[i + 1])
            for i in range(len(self.breakpoints))
        )
        return IntervalSet(self.breakpoints, points, self.gaps_in)._normalized()

    def closure(self) -> "IntervalSet":
        return self._with_points(lambda left, point, right: left or point or right)

    def interior(self) -> "IntervalSet":
        return self._with_points(lambda left, point, right: left and point and right)

    def density_one(self) -> "IntervalSet":
        """Points of Lebesgue density one: a breakpoint needs both gaps inside."""
        return self._with_points(lambda left, _point, right: left and right)

    def density_zero(self) -> "IntervalSet":
        return (~self).density_one()

    def _boundary_points(self, rule: Callable[[bool, bool, bool], bool]) -> "IntervalSet":
        selected = [
            b
            for i, b in enumerate(self.breakpoints)
            if rule(self.gaps_in[i], self.points_in[i], self.gaps_in[i + 1])
        ]
        return IntervalSet.points(selected)

    def boundary(self) -> "IntervalSet":
        return self._boundary_points(
            lambda left, point, right: not left == point == right
        )

    def reduced_boundary(self) -> "IntervalSet":
        return self._boundary_points(lambda left, _point, right: left != right)

    def boundary_orientation(self) -> list[tuple[float, bool, Optional[float]]]:
        """
        Lists topological boundary points with their reduced flag.

        Returns:
            list: (point, reduced, outward normal) triples; the normal is +1
            when the set lies to the left, -1 when it lies to the right, and
            None for points that are not in the reduced boundary.
        """

        result = []
        for i, b in enumerate(self.breakpoints):
            left, point, right = self.gaps_in[i], self.points_in[i], self.gaps_in[i + 1]
            if left == point == right:
                continue
            if left != right:
                result.append((b, True, 1.0 if left else -1.0))
            else:
                result.append((b, False, None))
        return result

    # metric

    def dilate(self, lo: float, hi: float, closed: bool = True) -> "IntervalSet":
        """
        Minkowski sum with the interval [lo, hi] (or its interior).

        Args:
            lo: Left end of the structuring interval.
            hi: Right end of the structuring interval.
            closed: Whether the structuring interval is closed.

        Returns:
            IntervalSet: The dilated set.
        """

        dilated = [
            (
                c_lo + lo,
                c_hi + hi,
                closed and c_closed_lo,
                closed and c_closed_hi,
            )
            for c_lo, c_hi, c_closed_lo, c_closed_hi in self.components()
        ]
        return IntervalSet.from_components(dilated)

    def measure(self) -> float:
        total = 0.0
        for index, inside in enumerate(self.gaps_in):
            if not inside:
                continue
            if index == 0 or index == len(self.breakpoints):
                return math.inf
            total += self.breakpoints[index] - self.breakpoints[index - 1]
        return total

    def components(self) -> list[Component]:
        """
        Maximal connected pieces as (lo, hi, closed_lo, closed_hi).

        Returns:
            list[Component]: Components from left to right.
        """

        pieces: list[tuple[float, float, bool]] = []
        k = len(self.breakpoints)
        for index in range(k + 1):
            lo = -math.inf if index == 0 else self.breakpoints[index - 1]
            hi = math.inf if index == k else self.breakpoints[index]
            pieces.append((lo, hi, self.gaps_in[index]))
            if index < k:
                pieces.append((hi, hi, self.points_in[index]))

        result: list[Component] = []
        current: Optional[list] = None
        for lo, hi, inside in pieces:
            is_point = lo == hi
            if inside:
                if current is None:
                    current = [lo, hi, is_point, is_point]
                else:
                    current[1] = hi
                    current[3] = is_point
            elif current is not None:
                result.append(tuple(current))
                current = None
        if current is not None:
            result.append(tuple(current))
        return result

    @property
    def is_empty(self) -> bool:
        return not any(self.points_in) and not any(self.gaps_in)

    def isolated_points(self) -> list[float]:
        return [lo for lo, hi, _, _ in self.components() if lo == hi]

    def bounds(self) -> tuple[float, float]:
        parts = self.components()
        if not parts:
            return math.inf, -math.inf
        return parts[0][0], parts[-1][1]


def _gap_samples(breakpoints: tuple[float, ...]) -> list[float]:
    if not breakpoints:
        return [0.0]
    samples = [breakpoints[0] - 1.0]
    samples.extend(0.5 * (a + b) for a, b in zip(breakpoints, breakpoints[1:]))
    samples.append(breakpoints[-1] + 1.0)
    return samples
