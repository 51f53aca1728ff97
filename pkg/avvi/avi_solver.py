import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from avvi.config import MAX_PATTERN_CONSTRAINTS
from avvi.exact_linalg import (
    AffineSet,
    DimensionError,
    Infeasible,
    LinIneqSystem,
    Matrix,
    Vector,
    affine_hull,
    fm_project,
    is_feasible,
    solve_affine_system,
)
from avvi.model import (
    EMPTY_PATTERN,
    OUTSIDE,
    ActivePattern,
    AffineOperator,
    AvviProblem,
    Constraint,
    Polyhedron,
    Unconstrained,
    Weight,
    active_pattern_of,
    scalarize,
)
from avvi.utils import parallel_map

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


class TooManyConstraintsError(ValueError):
    pass


@dataclass(frozen=True)
class KktWitness:
    x: Vector
    lam: Optional[Vector]
    pattern: ActivePattern


@dataclass(frozen=True)
class PatternPiece:
    pattern: ActivePattern
    xset: LinIneqSystem
    dimension: int

    def witness(self) -> Vector:
        return is_feasible(self.xset).witness

    def hull(self) -> AffineSet:
        return affine_hull(self.xset)

    def contains(self, x: Vector) -> bool:
        return self.xset.contains(x)

    def closure_contains(self, x: Vector) -> bool:
        return self.xset.relaxed().contains(x)

    def to_dict(self):
        return {"pattern": str(self.pattern), "dimension": self.dimension, "xset": self.xset.to_dict()}


@dataclass(frozen=True)
class AviSolutionSet:
    pieces: Tuple[PatternPiece, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def singleton(self) -> Optional[Vector]:
        if len(self.pieces) == 1 and self.pieces[0].dimension == 0:
            return self.pieces[0].witness()
        return None


def _point_system(x: Vector) -> LinIneqSystem:
    n = len(x)
    return LinIneqSystem(n, equalities=tuple((Vector.unit(n, j), x[j]) for j in range(n)))


def solve_unconstrained(op: AffineOperator) -> Union[AffineSet, Infeasible]:
    return solve_affine_system(op.M, -op.q)


def kkt_system(op: AffineOperator, K: Polyhedron, pattern: ActivePattern) -> LinIneqSystem:
    """System in (x, lambda_alpha) for the pseudo-face of `pattern`."""

    n = op.n
    alpha = pattern.indices
    k = len(alpha)
    dim = n + k

    equalities = []
    for r in range(n):
        coeffs = list(op.M.row(r)) + [-K.A[i - 1, r] for i in alpha]
        equalities.append((Vector(tuple(coeffs)), -op.q[r]))
    for i in alpha:
        equalities.append((K.A.row(i - 1).padded(k), K.b[i - 1]))

    strict = [(K.A.row(i).padded(k), K.b[i]) for i in range(K.p) if (i + 1) not in pattern]
    nonstrict = [(Vector.unit(dim, n + l), 0) for l in range(k)]
    return LinIneqSystem(dim, tuple(strict), tuple(nonstrict), tuple(equalities))


def solve_pattern(op: AffineOperator, K: Polyhedron, pattern: ActivePattern) -> Optional[PatternPiece]:

    if K.n != op.n:
        raise DimensionError(f"operator in R^{op.n} against constraint in R^{K.n}")
    pattern.check(K.p)
    n = op.n
    system = kkt_system(op, K, pattern)

    E = Matrix.from_rows([list(c) for c, _ in system.equalities])
    solved = solve_affine_system(E, Vector(tuple(d for _, d in system.equalities)))
    if isinstance(solved, Infeasible):
        return None
    if solved.dimension == 0:
        if not system.contains(solved.base):
            return None
        x = Vector(solved.base.entries[:n])
        return PatternPiece(pattern, _point_system(x), 0)

    xset = fm_project(system, range(n))
    hull = affine_hull(xset)
    if isinstance(hull, Infeasible):
        return None
    return PatternPiece(pattern, xset, hull.dimension)


def solve_avi(op: AffineOperator, constraint: Constraint) -> AviSolutionSet:

    if isinstance(constraint, Unconstrained):
        solved = solve_unconstrained(op)
        if isinstance(solved, Infeasible):
            return AviSolutionSet()
        n = op.n
        xset = LinIneqSystem(n, equalities=tuple((op.M.row(r), -op.q[r]) for r in range(n)))
        return AviSolutionSet((PatternPiece(EMPTY_PATTERN, xset, solved.dimension),))

    if constraint.p > MAX_PATTERN_CONSTRAINTS:
        raise TooManyConstraintsError(
            f"pattern enumeration over p={constraint.p} constraints exceeds the limit {MAX_PATTERN_CONSTRAINTS}"
        )
    patterns = [ActivePattern(mask) for mask in range(1 << constraint.p)]
    solved = parallel_map(lambda pattern: solve_pattern(op, constraint, pattern), patterns)
    return AviSolutionSet(tuple(piece for piece in solved if piece is not None))


def solution_at(problem: AvviProblem, w: Weight) -> AviSolutionSet:
    return solve_avi(scalarize(problem, w), problem.constraint)


def find_kkt_witness(op: AffineOperator, constraint: Constraint, x: Vector) -> Optional[KktWitness]:

    if len(x) != op.n:
        raise DimensionError(f"point of length {len(x)} for an operator in R^{op.n}")
    residual = op(x)
    if isinstance(constraint, Unconstrained):
        return KktWitness(x, None, EMPTY_PATTERN) if residual.is_zero else None

    pattern = active_pattern_of(constraint, x)
    if pattern is OUTSIDE:
        return None
    alpha = pattern.indices
    k = len(alpha)
    equalities = tuple(
        (Vector(tuple(constraint.A[i - 1, r] for i in alpha)), residual[r]) for r in range(op.n)
    )
    nonstrict = tuple((Vector.unit(k, l), 0) for l in range(k))
    found = is_feasible(LinIneqSystem(k, (), nonstrict, equalities))
    if not found:
        return None

    lam = [0] * constraint.p
    for l, i in enumerate(alpha):
        lam[i - 1] = found.witness[l]
    return KktWitness(x, Vector(tuple(lam)), pattern)


def is_vi_solution(op: AffineOperator, constraint: Constraint, x: Vector) -> bool:
    return find_kkt_witness(op, constraint, x) is not None


def _feasible_directions(problem: AvviProblem) -> List[Tuple[Vector, object]]:
    if isinstance(problem.constraint, Unconstrained):
        return []
    return [problem.constraint.row(i) for i in range(problem.p)]


def _check_point(problem: AvviProblem, x: Vector):
    if len(x) != problem.n:
        raise DimensionError(f"point of length {len(x)} for a problem in R^{problem.n}")


def is_weak_pareto(problem: AvviProblem, x: Vector) -> bool:

    _check_point(problem, x)
    if not problem.constraint.contains(x):
        return False
    values = [op(x) for op in problem.operators]
    strict = tuple((-v, -v.dot(x)) for v in values)
    improving = LinIneqSystem(problem.n, strict, tuple(_feasible_directions(problem)))
    return not is_feasible(improving)


def is_pareto(problem: AvviProblem, x: Vector) -> bool:

    _check_point(problem, x)
    if not problem.constraint.contains(x):
        return False
    values = [op(x) for op in problem.operators]
    base = _feasible_directions(problem) + [(-v, -v.dot(x)) for v in values]
    for v in values:
        improving = LinIneqSystem(problem.n, ((-v, -v.dot(x)),), tuple(base))
        if is_feasible(improving):
            return False
    return True
