import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from avvi.avi_solver import is_pareto, is_vi_solution
from avvi.exact_linalg import Vector, is_feasible
from avvi.model import AvviProblem
from avvi.parametric_sweep import (
    BicriteriaSweep,
    Bounded,
    Mode,
    OpenInterval,
    PointCell,
    SolutionPiece,
    limit_at,
)
from avvi.utils import parallel_map

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


@dataclass
class PieceGraph:
    pieces: List[SolutionPiece]
    edges: List[Tuple[int, int]]
    mode: Mode
    certified: bool = True
    problem: Optional[AvviProblem] = field(default=None, repr=False, compare=False)

    def to_dict(self):
        return {
            "mode": self.mode.value,
            "certified": self.certified,
            "pieces": [piece.to_dict() for piece in self.pieces],
            "edges": [list(edge) for edge in self.edges],
        }


@dataclass
class ComponentReport:
    mode: Mode
    count: int
    components: List[List[int]]
    witnesses: List[Vector]
    certified: bool = True

    def to_dict(self):
        return {
            "mode": self.mode.value,
            "count": self.count,
            "certified": self.certified,
            "components": self.components,
            "witnesses": [w.to_list() for w in self.witnesses],
        }


@dataclass
class ModeDifference:
    removed_points: List[Vector]
    consistent: bool
    removed_not_pareto: bool

    def to_dict(self):
        return {
            "removed_points": [x.to_list() for x in self.removed_points],
            "consistent": self.consistent,
            "removed_not_pareto": self.removed_not_pareto,
        }


def _curve_meets_point(curve_piece: SolutionPiece, point_piece: SolutionPiece) -> bool:
    limit = limit_at(curve_piece.geometry.curve, point_piece.cell.value)
    if not isinstance(limit, Bounded) or limit.point is None:
        return False
    return point_piece.geometry.piece.closure_contains(limit.point)


def _points_meet(left: SolutionPiece, right: SolutionPiece) -> bool:
    a, b = left.geometry.piece.xset, right.geometry.piece.xset
    return bool(is_feasible(a.relaxed().combined(b.relaxed())))


def _curves_cross(left: SolutionPiece, right: SolutionPiece, sweep: BicriteriaSweep) -> bool:
    """Curves on the two sides of a rational critical joined through a common limit."""

    value = right.cell.lo
    a = limit_at(left.geometry.curve, value)
    b = limit_at(right.geometry.curve, value)
    if not (isinstance(a, Bounded) and isinstance(b, Bounded)):
        return False
    if a.point is None or a.point != b.point:
        return False
    return is_vi_solution(sweep.operator_at(value), sweep.problem.constraint, a.point)


def _curves_coincide(left: SolutionPiece, right: SolutionPiece) -> bool:
    t = left.cell.sample()
    return left.geometry.curve.at(t) == right.geometry.curve.at(t)


def _bounded_at(piece: SolutionPiece, endpoint) -> bool:
    return isinstance(limit_at(piece.geometry.curve, endpoint), Bounded)


def build_piece_graph(
    problem: AvviProblem,
    mode: Mode = Mode.WEAK,
    exact: bool = True,
    sweep: Optional[BicriteriaSweep] = None,
) -> PieceGraph:

    mode = Mode(mode)
    sweep = sweep or BicriteriaSweep(problem, exact=exact)
    pieces = sweep.pieces(mode)
    cells = sweep.cells(mode)
    by_cell = {cell.index: [] for cell in cells}
    for piece in pieces:
        by_cell[piece.cell.index].append(piece)

    checks = []
    joined = []
    certified = all(c.is_exact for c in sweep.critical_values())

    for k, cell in enumerate(cells):
        here = by_cell[k]
        for a in range(len(here)):
            for b in range(a + 1, len(here)):
                kind = "curves" if isinstance(cell, OpenInterval) else "points"
                checks.append((kind, here[a], here[b]))

        if not isinstance(cell, PointCell):
            continue
        left = by_cell[k - 1] if k > 0 else []
        right = by_cell[k + 1] if k + 1 < len(cells) else []
        if not cell.is_exact:
            bounded = [c for c in left if _bounded_at(c, cell.value)] + [c for c in right if _bounded_at(c, cell.value)]
            joined.extend((x.id, y.id) for x, y in zip(bounded, bounded[1:]))
            continue
        for curve in left + right:
            for point in here:
                checks.append(("limit", curve, point))
        for l in left:
            for r in right:
                checks.append(("cross", l, r))

    def holds(check) -> bool:
        kind, x, y = check
        if kind == "limit":
            return _curve_meets_point(x, y)
        if kind == "points":
            return _points_meet(x, y)
        if kind == "cross":
            return _curves_cross(x, y, sweep)
        return _curves_coincide(x, y)

    results = parallel_map(holds, checks)
    edges = {tuple(sorted((x.id, y.id))) for (_, x, y), ok in zip(checks, results) if ok}
    edges.update(tuple(sorted(e)) for e in joined)
    graph = PieceGraph(pieces, sorted(edges), mode, certified, problem)
    logger.info(f"{mode.value} piece graph: {len(pieces)} pieces, {len(graph.edges)} edges")
    return graph


def count_components(graph: PieceGraph) -> ComponentReport:

    size = len(graph.pieces)
    if size == 0:
        return ComponentReport(graph.mode, 0, [], [], graph.certified)

    rows = [a for a, _ in graph.edges]
    cols = [b for _, b in graph.edges]
    adjacency = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    count, labels = connected_components(adjacency, directed=False)

    groups = {}
    for piece_id, label in enumerate(labels):
        groups.setdefault(int(label), []).append(piece_id)
    components = sorted(groups.values(), key=min)
    witnesses = [graph.pieces[group[0]].witness() for group in components]
    logger.info(f"{graph.mode.value}: {count} connected component(s)")
    return ComponentReport(graph.mode, int(count), components, witnesses, graph.certified)


def _mode_signature(piece: SolutionPiece):
    cell = piece.cell
    if isinstance(cell, PointCell):
        return ("point", cell.value, piece.pattern)
    return ("curve", piece.pattern, piece.geometry.curve.coords)


def _at_boundary(piece: SolutionPiece) -> bool:
    return isinstance(piece.cell, PointCell) and piece.cell.is_exact and piece.cell.value in (0, 1)


def compare_modes(weak: PieceGraph, pareto: PieceGraph) -> ModeDifference:
    """Weak and Pareto pieces differ only by weak points at xi_1 in {0, 1}."""

    if weak.mode != Mode.WEAK or pareto.mode != Mode.PARETO:
        raise ValueError("compare_modes expects a weak graph and a pareto graph")
    problem = weak.problem or pareto.problem

    removed: List[Vector] = []
    for piece in weak.pieces:
        if _at_boundary(piece):
            removed.append(piece.witness())
        elif isinstance(piece.cell, OpenInterval):
            curve = piece.geometry.curve
            if piece.cell.lo_closed:
                removed.append(curve.at(Fraction(0)))
            if piece.cell.hi_closed:
                removed.append(curve.at(Fraction(1)))
    removed = list(dict.fromkeys(removed))

    weak_rest = sorted(str(_mode_signature(p)) for p in weak.pieces if not _at_boundary(p))
    pareto_rest = sorted(str(_mode_signature(p)) for p in pareto.pieces)
    consistent = weak_rest == pareto_rest

    removed_not_pareto = problem is not None and all(not is_pareto(problem, x) for x in removed)
    if not consistent:
        logger.warning("Weak and pareto piece sets differ beyond the parameter endpoints")
    return ModeDifference(removed, consistent, removed_not_pareto)
