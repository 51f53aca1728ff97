import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

from avvi.config import GENERATOR_MAX_N
from avvi.exact_linalg import Matrix, Vector, interpolate_parametric_pf, is_skew_rows
from avvi.model import (
    UNCONSTRAINED,
    AffineOperator,
    AvviProblem,
    Polyhedron,
    UnsupportedProblemError,
    Weight,
    is_nondegenerate,
    require_bicriteria,
)
from avvi.polynomials import count_roots
from avvi.utils import to_rational

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


def _check_family(n: int, p: int, max_n: int = GENERATOR_MAX_N):
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and at least 2, got n={n}")
    if not 0 <= p <= n // 2:
        raise ValueError(f"p must lie in [0, n/2] = [0, {n // 2}], got p={p}")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the generator cap {max_n} (AVVI_GENERATOR_MAX_N)")


def _anti_diagonal(n: int, entries: List[int]) -> Matrix:
    rows = [[0] * n for _ in range(n)]
    for i, value in enumerate(entries):
        rows[i][n - 1 - i] = value
    return Matrix.from_rows(rows)


def gen_family(n: int, p: int = 0, max_n: int = GENERATOR_MAX_N) -> AvviProblem:
    """Skew bicriteria family with n/2 + p + 1 solution components."""

    _check_family(n, p, max_n)
    s = n // 2
    M1 = _anti_diagonal(n, [1 if i <= s else -1 for i in range(1, n + 1)])
    M2 = _anti_diagonal(n, [-i if i <= s else n + 1 - i for i in range(1, n + 1)])
    q = Vector(tuple([-1] * n))

    constraint = UNCONSTRAINED
    if p:
        rows = []
        for k in range(1, p + 1):
            row = [0] * n
            row[k - 1] = row[n - k] = -1
            rows.append(row)
        constraint = Polyhedron(Matrix.from_rows(rows), Vector(tuple([-1] * p)))

    return AvviProblem(
        (AffineOperator(M1, q), AffineOperator(M2, q)),
        constraint,
        meta={"family": "pp", "n": n, "p": p},
    )


def _unit_pair(n: int, j: int) -> Vector:
    """e_j - e_{n+1-j}, 1-based."""
    return Vector.unit(n, j - 1) - Vector.unit(n, n - j)


@dataclass(frozen=True)
class GroundTruth:
    n: int
    p: int

    @property
    def s(self) -> int:
        return self.n // 2

    @property
    def expected_chi(self) -> int:
        return self.s + self.p + 1

    @property
    def criticals(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(k, k + 1) for k in range(1, self.s + 1))

    def curve_at(self, t) -> Vector:

        t = to_rational(t)
        if t in self.criticals:
            raise ValueError(f"the curve diverges at {t}")
        top = [1 / (i - (i + 1) * t) for i in range(1, self.s + 1)]
        return Vector(tuple(top + [-x for x in reversed(top)]))

    @property
    def endpoints(self) -> Tuple[Vector, Vector]:
        return self.curve_at(0), self.curve_at(1)

    def line_base(self, k: int) -> Vector:

        if not 1 <= k <= self.p:
            raise ValueError(f"line index {k} outside 1..{self.p}")
        t = self.criticals[k - 1]
        base = Vector.unit(self.n, self.n - k)
        for j in range(1, self.s + 1):
            if j != k:
                base = base + _unit_pair(self.n, j) * (1 / (j - (j + 1) * t))
        return base

    def line_direction(self, k: int) -> Vector:
        return _unit_pair(self.n, k)

    def line_point(self, k: int, t) -> Vector:
        return self.line_base(k) + self.line_direction(k) * to_rational(t)

    def parameter_of(self, x: Vector) -> Fraction:
        """Inverse of the curve map, read off the first coordinate."""

        x1 = to_rational(x[0])
        if x1 == 0:
            raise ValueError("x_1 = 0 is not on the curve")
        return (x1 - 1) / (2 * x1)

    def to_dict(self):
        return {
            "n": self.n,
            "p": self.p,
            "expected_chi": self.expected_chi,
            "criticals": list(self.criticals),
            "endpoints": [x.to_list() for x in self.endpoints],
            "lines": [
                {"k": k, "base": self.line_base(k).to_list(), "direction": self.line_direction(k).to_list()}
                for k in range(1, self.p + 1)
            ],
        }


def ground_truth(n: int, p: int = 0) -> GroundTruth:
    _check_family(n, p)
    return GroundTruth(n, p)


def _pad_square(M: Matrix) -> Matrix:
    return M.padded(1, 1)


def lift_variable(problem: AvviProblem) -> AvviProblem:
    """Add a variable pinned to zero by the pair x_{n+1} >= 0, -x_{n+1} >= 0."""

    n = problem.n
    operators = tuple(AffineOperator(_pad_square(op.M), op.q.padded(1)) for op in problem.operators)
    rows = []
    rhs = []
    if not problem.is_unconstrained:
        K = problem.constraint
        rows = [list(K.A.row(i).padded(1)) for i in range(K.p)]
        rhs = list(K.b)
    rows += [list(Vector.unit(n + 1, n)), list(-Vector.unit(n + 1, n))]
    rhs += [0, 0]
    meta = dict(problem.meta, lifted_variables=problem.meta.get("lifted_variables", 0) + 1)
    return AvviProblem(operators, Polyhedron(Matrix.from_rows(rows), Vector(tuple(rhs))), meta=meta)


def lift_criterion(problem: AvviProblem) -> AvviProblem:
    """Duplicate the last criterion."""

    meta = dict(problem.meta, lifted_criteria=problem.meta.get("lifted_criteria", 0) + 1)
    return AvviProblem(problem.operators + (problem.operators[-1],), problem.constraint, meta=meta)


def split_weight(w: Weight) -> Weight:
    return Weight(w.xi[:-1] + (w.xi[-1] / 2, w.xi[-1] / 2))


def merge_weight(w: Weight) -> Weight:
    if w.m < 2:
        raise ValueError("merging needs at least two weights")
    return Weight(w.xi[:-2] + (w.xi[-2] + w.xi[-1],))


def embed_point(x: Vector) -> Vector:
    return x.padded(1)


def project_point(x: Vector) -> Vector:
    if x[len(x) - 1] != 0:
        raise ValueError("point does not lie on the lifted hyperplane x_{n+1} = 0")
    return Vector(x.entries[:-1])


class BoundKind(str, Enum):
    GENERAL_UPPER = "general_upper"
    SKEW_BICRITERIA_UPPER = "skew_bicriteria_upper"
    LOWER_MONOTONE = "lower_monotone"


@dataclass(frozen=True)
class Bound:
    kind: BoundKind
    value: Optional[int]
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.value is not None

    def to_dict(self):
        return {"kind": self.kind.value, "applicable": self.applicable, "value": self.value, "reason": self.reason}


def bounds(m: int, n: int, p: int, kind: BoundKind) -> Bound:

    if m < 1 or n < 1 or p < 0:
        raise ValueError(f"bounds need m, n >= 1 and p >= 0, got ({m}, {n}, {p})")
    kind = BoundKind(kind)
    if kind == BoundKind.GENERAL_UPPER:
        return Bound(kind, 2 * 3 ** (2 * m + 2 * n + 3 * p + 1))
    if kind == BoundKind.SKEW_BICRITERIA_UPPER:
        if m != 2 or p != 0 or n % 2:
            return Bound(kind, None, "needs m=2, p=0 and even n")
        return Bound(kind, n + 1)
    if m < 2 or p > n // 2:
        return Bound(kind, None, "needs m >= 2 and p <= n/2")
    return Bound(kind, n // 2 + p + 1)


def all_bounds(m: int, n: int, p: int) -> List[Bound]:
    return [bounds(m, n, p, kind) for kind in BoundKind]


class SkewRootBound(NamedTuple):
    roots: int
    bound: int


def skew_root_bound(problem: AvviProblem) -> SkewRootBound:
    """Distinct Pfaffian roots k in [0, 1]; the unconstrained skew count is at most 2k + 1."""

    require_bicriteria(problem, "the skew root bound")
    if not problem.is_unconstrained:
        raise UnsupportedProblemError("the skew root bound needs an unconstrained problem")
    M1, M2 = problem.operators[0].M, problem.operators[1].M
    if not (is_skew_rows(M1) and is_skew_rows(M2)):
        raise UnsupportedProblemError("the skew root bound needs skew-symmetric operators")
    if not is_nondegenerate(problem):
        raise UnsupportedProblemError("the skew root bound needs a nondegenerate problem")
    pf = interpolate_parametric_pf(M1, M2)
    k = count_roots(pf, 0, 1)
    return SkewRootBound(k, 2 * k + 1)


def lower_bound_witness(m: int, n: int, p: int = 0) -> AvviProblem:
    """Monotone problem with floor(n/2) + p + 1 components for any n >= 2."""

    if m < 2 or n < 2:
        raise ValueError(f"the lower bound needs m >= 2 and n >= 2, got m={m}, n={n}")
    even = 2 * (n // 2)
    problem = gen_family(even, p)
    if n % 2:
        problem = lift_variable(problem)
    for _ in range(m - 2):
        problem = lift_criterion(problem)
    problem.meta.update({"family": "lower_bound", "m": m, "n": n, "p": p, "expected_chi": n // 2 + p + 1})
    logger.info(f"Lower-bound witness for (m={m}, n={n}, p={p}) built from gen_family({even}, {p})")
    return problem
