import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, Tuple, Union

from avvi.exact_linalg import (
    DimensionError,
    LinIneqSystem,
    Matrix,
    Vector,
    interpolate_parametric_det,
    is_feasible,
    is_skew_rows,
)
from avvi.utils import format_rational, to_rational

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


class UnsupportedProblemError(ValueError):
    pass


@dataclass(frozen=True)
class Polyhedron:
    """K = {x : Ax >= b}."""

    A: Matrix
    b: Vector

    def __post_init__(self):
        if self.A.rows != len(self.b):
            raise DimensionError(f"A has {self.A.rows} rows but b has length {len(self.b)}")

    @property
    def p(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.A.cols

    def row(self, i: int) -> Tuple[Vector, Fraction]:
        return self.A.row(i), self.b[i]

    def contains(self, x: Vector) -> bool:
        return all(self.A.row(i).dot(x) >= self.b[i] for i in range(self.p))


@dataclass(frozen=True)
class Unconstrained:
    p = 0

    def contains(self, x: Vector) -> bool:
        return True


UNCONSTRAINED = Unconstrained()

Constraint = Union[Polyhedron, Unconstrained]


@dataclass(frozen=True)
class AffineOperator:
    """F(x) = Mx + q."""

    M: Matrix
    q: Vector

    def __post_init__(self):
        if not self.M.is_square:
            raise DimensionError(f"operator matrix must be square, got {self.M.rows}x{self.M.cols}")
        if len(self.q) != self.M.rows:
            raise DimensionError(f"q has length {len(self.q)} for a {self.M.rows}x{self.M.rows} operator")

    @property
    def n(self) -> int:
        return self.M.rows

    def __call__(self, x: Vector) -> Vector:
        return self.M @ x + self.q


@dataclass(frozen=True)
class AvviProblem:
    operators: Tuple[AffineOperator, ...]
    constraint: Constraint = UNCONSTRAINED
    meta: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(self.operators))
        if not self.operators:
            raise DimensionError("an AVVI needs at least one operator")
        n = self.operators[0].n
        if any(op.n != n for op in self.operators):
            raise DimensionError("all operators must share the dimension n")
        if isinstance(self.constraint, Polyhedron) and self.constraint.n != n:
            raise DimensionError(f"constraint has {self.constraint.n} columns, problem has n={n}")

    @property
    def n(self) -> int:
        return self.operators[0].n

    @property
    def m(self) -> int:
        return len(self.operators)

    @property
    def p(self) -> int:
        return self.constraint.p

    @property
    def is_unconstrained(self) -> bool:
        return isinstance(self.constraint, Unconstrained)


@dataclass(frozen=True)
class Weight:
    xi: Tuple[Fraction, ...]

    def __post_init__(self):
        xi = tuple(to_rational(x) for x in self.xi)
        if not xi:
            raise ValueError("empty weight")
        if any(x < 0 for x in xi):
            raise ValueError(f"weight entries must be nonnegative: {[format_rational(x) for x in xi]}")
        if sum(xi) != 1:
            raise ValueError(f"weight entries must sum to 1, got {format_rational(sum(xi))}")
        object.__setattr__(self, "xi", xi)

    @classmethod
    def bicriteria(cls, xi1) -> "Weight":
        xi1 = to_rational(xi1)
        return cls((xi1, 1 - xi1))

    @property
    def m(self) -> int:
        return len(self.xi)

    @property
    def is_relative_interior(self) -> bool:
        return all(x > 0 for x in self.xi)

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(x) for x in self.xi) + ")"


@dataclass(frozen=True, order=True)
class ActivePattern:
    """Active constraint indices, 1-based as in {1, ..., p}."""

    bitmask: int = 0

    @classmethod
    def of(cls, indices: Iterable[int]) -> "ActivePattern":
        mask = 0
        for i in indices:
            if i < 1:
                raise ValueError(f"pattern indices start at 1, got {i}")
            mask |= 1 << (i - 1)
        return cls(mask)

    @property
    def alpha(self) -> FrozenSet[int]:
        return frozenset(i + 1 for i in range(self.bitmask.bit_length()) if self.bitmask >> i & 1)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.alpha))

    def __contains__(self, i: int) -> bool:
        return i >= 1 and bool(self.bitmask >> (i - 1) & 1)

    def __len__(self) -> int:
        return bin(self.bitmask).count("1")

    def issuperset(self, other: "ActivePattern") -> bool:
        return self.bitmask & other.bitmask == other.bitmask

    def check(self, p: int) -> "ActivePattern":
        if self.bitmask >> p:
            raise DimensionError(f"pattern {self} exceeds p={p}")
        return self

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"


EMPTY_PATTERN = ActivePattern(0)


@dataclass(frozen=True)
class Outside:
    pass


OUTSIDE = Outside()


def is_skew(M: Matrix) -> bool:

    if not M.is_square:
        raise DimensionError(f"skew test on a non-square {M.rows}x{M.cols} matrix")
    return is_skew_rows(M)


def is_psd(M: Matrix) -> bool:
    """Pivoted symmetric elimination of (M + M^T)/2."""

    if not M.is_square:
        raise DimensionError(f"PSD test on a non-square {M.rows}x{M.cols} matrix")
    n = M.rows
    S = [[(M[i, j] + M[j, i]) / 2 for j in range(n)] for i in range(n)]
    remaining = list(range(n))

    while remaining:
        if any(S[i][i] < 0 for i in remaining):
            return False
        pivot = next((i for i in remaining if S[i][i] > 0), None)
        if pivot is None:
            return all(S[i][j] == 0 for i in remaining for j in remaining)
        remaining.remove(pivot)
        d = S[pivot][pivot]
        for i in remaining:
            for j in remaining:
                S[i][j] -= S[i][pivot] * S[pivot][j] / d
    return True


def is_monotone(problem: AvviProblem) -> bool:
    return all(is_psd(op.M) for op in problem.operators)


def require_bicriteria(problem: AvviProblem, what: str):
    if problem.m != 2:
        raise UnsupportedProblemError(f"{what} is implemented for m=2 only, got m={problem.m}")


def is_nondegenerate(problem: AvviProblem) -> bool:

    require_bicriteria(problem, "nondegeneracy")
    M1, M2 = problem.operators[0].M, problem.operators[1].M
    return not interpolate_parametric_det(M1, M2).is_zero


def scalarize(problem: AvviProblem, w: Weight) -> AffineOperator:

    if w.m != problem.m:
        raise DimensionError(f"weight of length {w.m} for m={problem.m} criteria")
    n = problem.n
    M = Matrix.zeros(n, n)
    q = Vector.zeros(n)
    for xi, op in zip(w.xi, problem.operators):
        if xi:
            M = M + op.M * xi
            q = q + op.q * xi
    return AffineOperator(M, q)


def active_pattern_of(K: Polyhedron, x: Vector) -> Union[ActivePattern, Outside]:

    if len(x) != K.n:
        raise DimensionError(f"point of length {len(x)} tested against K in R^{K.n}")
    active = []
    for i in range(K.p):
        value = K.A.row(i).dot(x)
        if value < K.b[i]:
            return OUTSIDE
        if value == K.b[i]:
            active.append(i + 1)
    return ActivePattern.of(active)


def pseudo_face_system(K: Polyhedron, pattern: ActivePattern) -> LinIneqSystem:
    equalities = tuple(K.row(i - 1) for i in pattern.indices)
    strict = tuple(K.row(i) for i in range(K.p) if (i + 1) not in pattern)
    return LinIneqSystem(K.n, strict, (), equalities)


def implicit_equalities(K: Polyhedron) -> ActivePattern:
    """Rows active on every point of a nonempty K."""

    rows = [K.row(i) for i in range(K.p)]
    tight = []
    for i, row in enumerate(rows):
        others = tuple(rows[:i] + rows[i + 1:])
        if not is_feasible(LinIneqSystem(K.n, (row,), others)):
            tight.append(i + 1)
    return ActivePattern.of(tight)
