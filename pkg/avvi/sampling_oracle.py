import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np
from sklearn.cluster import DBSCAN
from tqdm import tqdm

from avvi.avi_solver import AviSolutionSet, PatternPiece, TooManyConstraintsError, solution_at
from avvi.config import (
    ORACLE_CLIP,
    ORACLE_EPS,
    ORACLE_GRID,
    ORACLE_MAX_DEPTH,
    ORACLE_MAX_PIECE_POINTS,
)
from avvi.exact_linalg import LinIneqSystem, Vector, fm_project, is_feasible
from avvi.model import AvviProblem, UnsupportedProblemError, Weight
from avvi.parametric_sweep import BicriteriaSweep, IrrationalCriticalValueError, Mode
from avvi.utils import parallel_map

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


@dataclass
class OracleReport:
    count: int
    points: int
    clipped: bool
    mode: Mode
    grid_resolution: int
    heuristic: bool = True

    def to_dict(self):
        return {
            "count": self.count,
            "points": self.points,
            "clipped": self.clipped,
            "mode": self.mode.value,
            "grid_resolution": self.grid_resolution,
            "heuristic": self.heuristic,
        }


def grid_resolution(m: int, grid: int) -> int:
    """Largest N whose simplex grid {k/N} over m weights has at most `grid` points."""

    if m <= 1:
        return 1
    if m == 2:
        return grid
    N = 1
    while math.comb(N + m, m - 1) <= grid:
        N += 1
    return N


def simplex_grid(m: int, N: int, interior: bool = False) -> List[Weight]:

    if m == 1:
        return [Weight((Fraction(1),))]
    weights = []
    # stars and bars: bar positions split N into m ordered parts
    for bars in combinations(range(N + m - 1), m - 1):
        parts, prev = [], -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(N + m - 2 - prev)
        if interior and 0 in parts:
            continue
        weights.append(Weight(tuple(Fraction(k, N) for k in parts)))
    return weights


def _in_box(x: Vector, clip: Fraction) -> bool:
    return all(abs(v) <= clip for v in x)


def _box_rows(n: int, clip: Fraction):
    rows = []
    for i in range(n):
        rows.append((Vector.unit(n, i), -clip))
        rows.append((-Vector.unit(n, i), -clip))
    return rows


class SamplingOracle:
    """Approximate component count from exact solutions on a weight grid."""

    def __init__(
        self,
        problem: AvviProblem,
        grid: int = ORACLE_GRID,
        eps: float = ORACLE_EPS,
        clip: float = ORACLE_CLIP,
        mode: Mode = Mode.WEAK,
        max_depth: int = ORACLE_MAX_DEPTH,
        max_piece_points: int = ORACLE_MAX_PIECE_POINTS,
        progress: bool = False,
    ):
        if grid <= 0 or eps <= 0 or clip <= 0:
            raise ValueError(f"oracle needs positive grid, eps and clip, got {grid}, {eps}, {clip}")
        self.problem = problem
        self.grid = int(grid)
        self.eps = float(eps)
        self.clip = Fraction(str(clip))
        self.spacing = Fraction(str(eps)) / 2
        self.mode = Mode(mode)
        self.max_depth = max_depth
        self.max_piece_points = max_piece_points
        self.progress = progress
        self.clipped = False

    @property
    def resolution(self) -> int:
        return grid_resolution(self.problem.m, self.grid)

    def _critical_weights(self) -> List[Weight]:

        if self.problem.m != 2:
            return []
        try:
            criticals = BicriteriaSweep(self.problem).critical_values()
        except (UnsupportedProblemError, IrrationalCriticalValueError, TooManyConstraintsError) as e:
            logger.warning(f"Oracle runs without critical parameters: {e}")
            return []
        interior = self.mode == Mode.PARETO
        return [Weight.bicriteria(c.value) for c in criticals if c.is_exact and not (interior and c.value in (0, 1))]

    def weights(self) -> List[Weight]:

        interior = self.mode == Mode.PARETO
        found = set(simplex_grid(self.problem.m, self.resolution, interior)) | set(self._critical_weights())
        return sorted(found, key=lambda w: w.xi)

    def _solve(self, w: Weight) -> AviSolutionSet:
        return solution_at(self.problem, w)

    def _coordinate_range(self, system: LinIneqSystem, j: int, fixed: List[Fraction]) -> Optional[Tuple[Fraction, Fraction]]:

        pinned = tuple((Vector.unit(system.dim, i), v) for i, v in enumerate(fixed))
        projected = fm_project(LinIneqSystem(system.dim, (), system.nonstrict, system.equalities + pinned), [j])
        lower, upper = [], []
        for (c, d), is_equality in [(row, False) for row in projected.nonstrict] + [(row, True) for row in projected.equalities]:
            a = c[0]
            if a == 0:
                if d > 0 or (is_equality and d != 0):
                    return None
                continue
            bound = d / a
            if is_equality or a > 0:
                lower.append(bound)
            if is_equality or a < 0:
                upper.append(bound)
        lo = max(lower) if lower else None
        hi = min(upper) if upper else None
        if lo is None or hi is None or lo > hi:
            return None
        return lo, hi

    def _exceeds_box(self, piece: PatternPiece) -> bool:

        closure = piece.xset.relaxed()
        n = closure.dim
        for c, d in _box_rows(n, self.clip):
            outside = LinIneqSystem(n, ((-c, -d),), closure.nonstrict, closure.equalities)
            if is_feasible(outside):
                return True
        return False

    def piece_points(self, piece: PatternPiece) -> List[Vector]:
        """Lattice of spacing eps/2 over the piece inside the clip box."""

        if piece.dimension == 0:
            x = piece.witness()
            if not _in_box(x, self.clip):
                self.clipped = True
                return []
            return [x]

        if self._exceeds_box(piece):
            self.clipped = True
        hull = piece.hull()
        d = hull.dimension
        closure = piece.xset.relaxed()
        rows = list(closure.nonstrict) + _box_rows(hull.ambient, self.clip)

        def to_coords(c: Vector, rhs: Fraction):
            return Vector(tuple(c.dot(u) for u in hull.directions)), rhs - c.dot(hull.base)

        system = LinIneqSystem(
            d,
            (),
            tuple(to_coords(c, rhs) for c, rhs in rows),
            tuple(to_coords(c, rhs) for c, rhs in closure.equalities),
        )
        steps = [self.spacing / sum(abs(v) for v in u) for u in hull.directions]

        points: List[Vector] = []

        def walk(fixed: List[Fraction]):
            if len(points) >= self.max_piece_points:
                return
            if len(fixed) == d:
                x = hull.point(fixed)
                if piece.contains(x):
                    points.append(x)
                return
            j = len(fixed)
            span = self._coordinate_range(system, j, fixed)
            if span is None:
                return
            lo, hi = span
            k = 0
            while lo + k * steps[j] <= hi and len(points) < self.max_piece_points:
                walk(fixed + [lo + k * steps[j]])
                k += 1

        walk([])
        if len(points) >= self.max_piece_points:
            logger.warning(f"Sampling of pattern {piece.pattern} stopped at {self.max_piece_points} points")
        return points

    def _points_of(self, solution: AviSolutionSet) -> List[Vector]:
        return [x for piece in solution.pieces for x in self.piece_points(piece)]

    def _refine(self, w0: Weight, x0: Vector, w1: Weight, x1: Vector, depth: int) -> List[Vector]:
        """Bisect between neighbouring weights whose singleton solutions are far apart."""

        if depth >= self.max_depth:
            return []
        if np.linalg.norm(np.array(x0.to_floats()) - np.array(x1.to_floats())) <= self.eps:
            return []
        mid = Weight(tuple((a + b) / 2 for a, b in zip(w0.xi, w1.xi)))
        x = self._solve(mid).singleton
        if x is None or not _in_box(x, self.clip):
            return []
        return self._refine(w0, x0, mid, x, depth + 1) + [x] + self._refine(mid, x, w1, x1, depth + 1)

    def neighbour_pairs(self, weights: List[Weight]) -> List[Tuple[int, int]]:

        if self.problem.m == 2:
            return [(k, k + 1) for k in range(len(weights) - 1)]
        step = Fraction(1, self.resolution)
        index = {w.xi: k for k, w in enumerate(weights)}
        pairs = []
        for k, w in enumerate(weights):
            for i in range(w.m):
                for j in range(w.m):
                    if i == j:
                        continue
                    shifted = list(w.xi)
                    shifted[i] += step
                    shifted[j] -= step
                    other = index.get(tuple(shifted))
                    if other is not None and other > k:
                        pairs.append((k, other))
        return pairs

    def run(self) -> OracleReport:

        weights = self.weights()
        iterator = tqdm(weights, desc="oracle weights", disable=not self.progress)
        solutions = parallel_map(self._solve, iterator)

        points: List[Vector] = []
        for solution in solutions:
            points.extend(self._points_of(solution))

        for a, b in self.neighbour_pairs(weights):
            x0, x1 = solutions[a].singleton, solutions[b].singleton
            if x0 is None or x1 is None or not (_in_box(x0, self.clip) and _in_box(x1, self.clip)):
                continue
            points.extend(self._refine(weights[a], x0, weights[b], x1, 0))

        if self.clipped:
            logger.warning(f"Oracle clipped unbounded solution pieces to the box of radius {float(self.clip)}")
        if not points:
            return OracleReport(0, 0, self.clipped, self.mode, self.resolution)

        X = np.array([x.to_floats() for x in points], dtype=float)
        labels = DBSCAN(eps=self.eps, min_samples=1).fit(X).labels_
        count = len(set(labels.tolist()))
        logger.info(f"Oracle: {count} cluster(s) from {len(points)} sample points over {len(weights)} weights")
        return OracleReport(count, len(points), self.clipped, self.mode, self.resolution)


def sampling_oracle(
    problem: AvviProblem,
    grid: int = ORACLE_GRID,
    eps: float = ORACLE_EPS,
    clip: float = ORACLE_CLIP,
    mode: Mode = Mode.WEAK,
    **kwargs,
) -> OracleReport:
    return SamplingOracle(problem, grid=grid, eps=eps, clip=clip, mode=mode, **kwargs).run()
