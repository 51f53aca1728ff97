import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from avvi.polynomials import UniPoly, lagrange_interpolate
from avvi.utils import format_rational, to_rational

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


class DimensionError(ValueError):
    pass


class NotSkewSymmetricError(ValueError):
    pass


@dataclass(frozen=True)
class Vector:
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(to_rational(x) for x in self.entries))

    @classmethod
    def zeros(cls, n: int) -> "Vector":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "Vector":
        return cls(tuple(1 if k == i else 0 for k in range(n)))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def _check(self, other: "Vector"):
        if len(other) != len(self):
            raise DimensionError(f"vector lengths differ: {len(self)} vs {len(other)}")

    def __add__(self, other: "Vector") -> "Vector":
        self._check(other)
        return Vector(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "Vector") -> "Vector":
        self._check(other)
        return Vector(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self) -> "Vector":
        return Vector(tuple(-a for a in self))

    def __mul__(self, scalar) -> "Vector":
        scalar = to_rational(scalar)
        return Vector(tuple(a * scalar for a in self))

    __rmul__ = __mul__

    def dot(self, other: "Vector") -> Fraction:
        self._check(other)
        return sum((a * b for a, b in zip(self, other)), Fraction(0))

    @property
    def is_zero(self) -> bool:
        return all(a == 0 for a in self)

    def padded(self, extra: int) -> "Vector":
        return Vector(self.entries + (Fraction(0),) * extra)

    def to_floats(self) -> List[float]:
        return [float(a) for a in self]

    def to_list(self) -> List[str]:
        return [format_rational(a) for a in self]

    def __str__(self) -> str:
        return "(" + ", ".join(self.to_list()) + ")"


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(to_rational(x) for x in self.entries)
        if len(entries) != self.rows * self.cols:
            raise DimensionError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(entries)}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DimensionError("ragged matrix rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> Vector:
        return Vector(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> Vector:
        return Vector(self.entries[j::self.cols])

    def to_rows(self) -> List[List[Fraction]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def _check_same_shape(self, other: "Matrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError(f"shapes differ: {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __mul__(self, scalar) -> "Matrix":
        scalar = to_rational(scalar)
        return Matrix(self.rows, self.cols, tuple(a * scalar for a in self.entries))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Vector):
            if len(other) != self.cols:
                raise DimensionError(f"cannot apply {self.rows}x{self.cols} matrix to length {len(other)}")
            return Vector(tuple(self.row(i).dot(other) for i in range(self.rows)))
        if other.rows != self.cols:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        return Matrix.from_rows([[self.row(i).dot(other.col(j)) for j in range(other.cols)] for i in range(self.rows)])

    def padded(self, extra_rows: int, extra_cols: int) -> "Matrix":
        rows = [r + [Fraction(0)] * extra_cols for r in self.to_rows()]
        rows += [[Fraction(0)] * (self.cols + extra_cols) for _ in range(extra_rows)]
        return Matrix(self.rows + extra_rows, self.cols + extra_cols, tuple(x for r in rows for x in r))

    def to_list(self) -> List[List[str]]:
        return [[format_rational(x) for x in r] for r in self.to_rows()]


@dataclass(frozen=True)
class AffineSet:
    base: Vector
    directions: Tuple[Vector, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.directions)

    @property
    def ambient(self) -> int:
        return len(self.base)

    def point(self, coords: Sequence) -> Vector:
        x = self.base
        for c, d in zip(coords, self.directions):
            x = x + d * c
        return x


@dataclass(frozen=True)
class Infeasible:
    reason: str = "inconsistent system"


Row = Tuple[Vector, Fraction]


@dataclass(frozen=True)
class LinIneqSystem:
    """Rows over R^dim: strict <c,x> > d, nonstrict <c,x> >= d, equalities <c,x> = d."""

    dim: int
    strict: Tuple[Row, ...] = ()
    nonstrict: Tuple[Row, ...] = ()
    equalities: Tuple[Row, ...] = ()

    def __post_init__(self):
        for kind in ("strict", "nonstrict", "equalities"):
            rows = tuple((c if isinstance(c, Vector) else Vector(tuple(c)), to_rational(d)) for c, d in getattr(self, kind))
            for c, _ in rows:
                if len(c) != self.dim:
                    raise DimensionError(f"row of length {len(c)} in a system over R^{self.dim}")
            object.__setattr__(self, kind, rows)

    def contains(self, x: Vector) -> bool:
        if len(x) != self.dim:
            raise DimensionError(f"point of length {len(x)} tested against R^{self.dim}")
        return (
            all(c.dot(x) == d for c, d in self.equalities)
            and all(c.dot(x) >= d for c, d in self.nonstrict)
            and all(c.dot(x) > d for c, d in self.strict)
        )

    def relaxed(self) -> "LinIneqSystem":
        return LinIneqSystem(self.dim, (), self.nonstrict + self.strict, self.equalities)

    def combined(self, other: "LinIneqSystem") -> "LinIneqSystem":
        if other.dim != self.dim:
            raise DimensionError("systems live in different dimensions")
        return LinIneqSystem(
            self.dim,
            self.strict + other.strict,
            self.nonstrict + other.nonstrict,
            self.equalities + other.equalities,
        )

    @property
    def row_count(self) -> int:
        return len(self.strict) + len(self.nonstrict) + len(self.equalities)

    def to_dict(self):
        def dump(rows):
            return [{"c": c.to_list(), "d": format_rational(d)} for c, d in rows]

        return {
            "dim": self.dim,
            "equalities": dump(self.equalities),
            "nonstrict": dump(self.nonstrict),
            "strict": dump(self.strict),
        }


def _elimination(M: Matrix, rhs: Vector):

    rows = [M.to_rows()[i] + [rhs[i]] for i in range(M.rows)]
    pivots = []
    r = 0
    for c in range(M.cols):
        p = next((i for i in range(r, M.rows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pivot = rows[r][c]
        rows[r] = [x / pivot for x in rows[r]]
        for i in range(M.rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == M.rows:
            break
    return rows, pivots


def solve_affine_system(M: Matrix, rhs: Vector) -> Union[AffineSet, Infeasible]:

    if len(rhs) != M.rows:
        raise DimensionError(f"right-hand side of length {len(rhs)} for {M.rows} equations")
    rows, pivots = _elimination(M, rhs)

    for i in range(len(pivots), M.rows):
        if rows[i][-1] != 0:
            return Infeasible(f"row {i} reduces to 0 = {format_rational(rows[i][-1])}")

    base = [Fraction(0)] * M.cols
    for i, c in enumerate(pivots):
        base[c] = rows[i][-1]

    directions = []
    for f in (c for c in range(M.cols) if c not in pivots):
        d = [Fraction(0)] * M.cols
        d[f] = Fraction(1)
        for i, c in enumerate(pivots):
            d[c] = -rows[i][f]
        directions.append(Vector(tuple(d)))

    return AffineSet(Vector(tuple(base)), tuple(directions))


def rank(M: Matrix) -> int:
    _, pivots = _elimination(M, Vector.zeros(M.rows))
    return len(pivots)


def determinant(M: Matrix) -> Fraction:
    """Bareiss fraction-free elimination."""

    if not M.is_square:
        raise DimensionError(f"determinant of a non-square {M.rows}x{M.cols} matrix")
    n = M.rows
    if n == 0:
        return Fraction(1)

    a = M.to_rows()
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return Fraction(0)
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_skew_rows(M: Matrix) -> bool:
    return M.is_square and all(M[i, j] == -M[j, i] for i in range(M.rows) for j in range(i, M.cols))


def pfaffian(M: Matrix) -> Fraction:
    """Pfaffian by skew elimination, with pf([[0, a], [-a, 0]]) = a."""

    if not M.is_square:
        raise DimensionError(f"Pfaffian of a non-square {M.rows}x{M.cols} matrix")
    if M.rows % 2:
        raise NotSkewSymmetricError(f"Pfaffian needs even dimension, got {M.rows}")
    if not is_skew_rows(M):
        raise NotSkewSymmetricError("Pfaffian needs an exactly skew-symmetric matrix")

    a = M.to_rows()
    n = M.rows
    result = Fraction(1)
    for k in range(0, n, 2):
        p = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k + 1:
            # simultaneous row/column swap flips the sign
            a[k + 1], a[p] = a[p], a[k + 1]
            for row in a:
                row[k + 1], row[p] = row[p], row[k + 1]
            result = -result
        pivot = a[k][k + 1]
        result *= pivot
        u = [a[k][j] for j in range(n)]
        v = [a[k + 1][j] for j in range(n)]
        for i in range(k + 2, n):
            for j in range(k + 2, n):
                a[i][j] -= (u[i] * v[j] - v[i] * u[j]) / pivot
    return result


def pencil(M1: Matrix, M2: Matrix, t) -> Matrix:
    """t*M1 + (1-t)*M2."""

    t = to_rational(t)
    return M1 * t + M2 * (1 - t)


def interpolate_parametric(evaluate, degree_bound: int) -> UniPoly:
    nodes = [Fraction(k) for k in range(degree_bound + 1)]
    return lagrange_interpolate(nodes, [evaluate(t) for t in nodes])


def interpolate_parametric_det(M1: Matrix, M2: Matrix) -> UniPoly:

    if not (M1.is_square and M2.is_square) or M1.rows != M2.rows:
        raise DimensionError(f"pencil needs equal square matrices, got {M1.rows}x{M1.cols} and {M2.rows}x{M2.cols}")
    return interpolate_parametric(lambda t: determinant(pencil(M1, M2, t)), M1.rows)


def interpolate_parametric_pf(M1: Matrix, M2: Matrix) -> UniPoly:

    if not (M1.is_square and M2.is_square) or M1.rows != M2.rows:
        raise DimensionError("pencil needs equal square matrices")
    if M1.rows % 2 or not is_skew_rows(M1) or not is_skew_rows(M2):
        raise NotSkewSymmetricError("Pfaffian pencil needs two skew-symmetric matrices of even dimension")
    return interpolate_parametric(lambda t: pfaffian(pencil(M1, M2, t)), M1.rows // 2)


EQ, GE, GT = "eq", "ge", "gt"

_Coeffs = Tuple[Fraction, ...]
_Row = Tuple[_Coeffs, Fraction, str]


def _false_row(dim: int) -> _Row:
    return (tuple(Fraction(0) for _ in range(dim)), Fraction(1), GE)


def _normalize(row: _Row) -> _Row:
    coeffs, rhs, kind = row
    pivot = next((c for c in coeffs if c != 0), None)
    if pivot is None:
        return row
    scale = pivot if kind == EQ else abs(pivot)
    return (tuple(c / scale for c in coeffs), rhs / scale, kind)


def _trivial_truth(row: _Row) -> Optional[bool]:
    coeffs, rhs, kind = row
    if any(c != 0 for c in coeffs):
        return None
    if kind == EQ:
        return rhs == 0
    if kind == GE:
        return rhs <= 0
    return rhs < 0


def _clean(rows: Iterable[_Row], dim: int) -> List[_Row]:

    equalities: Dict[Tuple, _Row] = {}
    tightest: Dict[_Coeffs, Tuple[Fraction, str]] = {}
    for row in rows:
        row = _normalize(row)
        truth = _trivial_truth(row)
        if truth is True:
            continue
        if truth is False:
            return [_false_row(dim)]
        coeffs, rhs, kind = row
        if kind == EQ:
            equalities[(coeffs, rhs)] = row
            continue
        best = tightest.get(coeffs)
        if best is None or rhs > best[0] or (rhs == best[0] and kind == GT):
            tightest[coeffs] = (rhs, kind)
    out = list(equalities.values())
    out.extend((coeffs, rhs, kind) for coeffs, (rhs, kind) in tightest.items())
    return out


def _eliminate(rows: List[_Row], j: int, dim: int) -> List[_Row]:

    eq = next((r for r in rows if r[2] == EQ and r[0][j] != 0), None)
    if eq is not None:
        c, d, _ = eq
        out = []
        for r in rows:
            if r is eq:
                continue
            f = r[0][j] / c[j]
            if f == 0:
                out.append(r)
            else:
                out.append((tuple(a - f * b for a, b in zip(r[0], c)), r[1] - f * d, r[2]))
        return _clean(out, dim)

    lower, upper, rest = [], [], []
    for r in rows:
        if r[0][j] > 0:
            lower.append(r)
        elif r[0][j] < 0:
            upper.append(r)
        else:
            rest.append(r)
    for lo in lower:
        for up in upper:
            a, b = lo[0][j], -up[0][j]
            coeffs = tuple(b * x + a * y for x, y in zip(lo[0], up[0]))
            kind = GT if GT in (lo[2], up[2]) else GE
            rest.append((coeffs, b * lo[1] + a * up[1], kind))
    return _clean(rest, dim)


def _pick_variable(rows: List[_Row], candidates: List[int]) -> int:

    for j in candidates:
        if any(r[2] == EQ and r[0][j] != 0 for r in rows):
            return j

    def cost(j):
        pos = sum(1 for r in rows if r[0][j] > 0)
        neg = sum(1 for r in rows if r[0][j] < 0)
        return pos * neg - pos - neg

    return min(candidates, key=lambda j: (cost(j), -j))


def _rows_of(sys: LinIneqSystem) -> List[_Row]:
    rows = [(c.entries, d, EQ) for c, d in sys.equalities]
    rows += [(c.entries, d, GE) for c, d in sys.nonstrict]
    rows += [(c.entries, d, GT) for c, d in sys.strict]
    return _clean(rows, sys.dim)


def _system_of(rows: List[_Row], keep: Sequence[int]) -> LinIneqSystem:
    buckets = {EQ: [], GE: [], GT: []}
    for coeffs, rhs, kind in rows:
        buckets[kind].append((Vector(tuple(coeffs[k] for k in keep)), rhs))
    return LinIneqSystem(len(keep), tuple(buckets[GT]), tuple(buckets[GE]), tuple(buckets[EQ]))


def fm_project(sys: LinIneqSystem, keep: Iterable[int]) -> LinIneqSystem:
    """Fourier-Motzkin projection onto the coordinates in `keep` (sorted order)."""

    keep = sorted(set(keep))
    if any(k < 0 or k >= sys.dim for k in keep):
        raise DimensionError(f"keep indices {keep} outside R^{sys.dim}")
    rows = _rows_of(sys)
    todo = [j for j in range(sys.dim) if j not in keep]
    while todo:
        j = _pick_variable(rows, todo)
        rows = _eliminate(rows, j, sys.dim)
        todo.remove(j)
    return _system_of(rows, keep)


class Feasibility(NamedTuple):
    feasible: bool
    witness: Optional[Vector]

    def __bool__(self):
        return self.feasible


def _choose_value(rows: List[_Row], j: int, values: Dict[int, Fraction]) -> Fraction:

    lo = hi = None
    lo_strict = hi_strict = False
    for coeffs, rhs, kind in rows:
        a = coeffs[j]
        if a == 0:
            continue
        rest = rhs - sum(c * values[k] for k, c in enumerate(coeffs) if k != j and c != 0)
        bound = rest / a
        if kind == EQ:
            return bound
        strict = kind == GT
        if a > 0:
            if lo is None or bound > lo or (bound == lo and strict):
                lo, lo_strict = bound, strict
        else:
            if hi is None or bound < hi or (bound == hi and strict):
                hi, hi_strict = bound, strict

    if lo is not None and hi is not None:
        if lo == hi:
            return lo
        return (lo + hi) / 2
    if lo is not None:
        return lo + 1 if lo_strict else lo
    if hi is not None:
        return hi - 1 if hi_strict else hi
    return Fraction(0)


def is_feasible(sys: LinIneqSystem) -> Feasibility:

    rows = _rows_of(sys)
    stages = []
    todo = list(range(sys.dim))
    while todo:
        j = _pick_variable(rows, todo)
        stages.append((j, rows))
        rows = _eliminate(rows, j, sys.dim)
        todo.remove(j)

    if any(_trivial_truth(r) is False for r in rows):
        return Feasibility(False, None)

    values: Dict[int, Fraction] = {j: Fraction(0) for j in range(sys.dim)}
    for j, stage_rows in reversed(stages):
        values[j] = _choose_value(stage_rows, j, values)

    witness = Vector(tuple(values[j] for j in range(sys.dim)))
    if not sys.contains(witness):
        raise ArithmeticError("Fourier-Motzkin back-substitution produced a non-witness")
    return Feasibility(True, witness)


def affine_hull(sys: LinIneqSystem) -> Union[AffineSet, Infeasible]:
    """Affine hull of a nonempty system, with a witness as base point."""

    found = is_feasible(sys)
    if not found:
        return Infeasible("empty system")

    implicit = list(sys.equalities)
    for idx, (c, d) in enumerate(sys.nonstrict):
        others = sys.nonstrict[:idx] + sys.nonstrict[idx + 1:]
        tightened = LinIneqSystem(sys.dim, sys.strict + ((c, d),), others, sys.equalities)
        if not is_feasible(tightened):
            implicit.append((c, d))

    if not implicit:
        directions = tuple(Vector.unit(sys.dim, i) for i in range(sys.dim))
        return AffineSet(found.witness, directions)

    E = Matrix.from_rows([list(c) for c, _ in implicit])
    solved = solve_affine_system(E, Vector(tuple(d for _, d in implicit)))
    return AffineSet(found.witness, solved.directions)


def squared_distance_to_hyperplane(x: Vector, c: Vector, d) -> Fraction:
    if c.is_zero:
        raise ValueError("hyperplane normal must be nonzero")
    return (c.dot(x) - to_rational(d)) ** 2 / c.dot(c)
