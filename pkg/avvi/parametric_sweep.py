import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

from avvi.avi_solver import PatternPiece, solve_avi, solve_pattern
from avvi.config import MAX_PATTERN_CONSTRAINTS, ROOT_WIDTH
from avvi.exact_linalg import (
    LinIneqSystem,
    Matrix,
    Vector,
    determinant,
    is_feasible,
    rank,
    solve_affine_system,
)
from avvi.model import (
    EMPTY_PATTERN,
    ActivePattern,
    AvviProblem,
    UnsupportedProblemError,
    Weight,
    implicit_equalities,
    is_monotone,
    pseudo_face_system,
    require_bicriteria,
    scalarize,
)
from avvi.polynomials import (
    ExactRational,
    IsolatingInterval,
    Root,
    UniPoly,
    count_roots_open,
    lagrange_interpolate,
    merge_roots,
    rational_roots,
)
from avvi.utils import format_rational, parallel_map, to_rational

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


class IrrationalCriticalValueError(ValueError):
    pass


class SweepInvariantError(ValueError):
    pass


class Mode(str, Enum):
    WEAK = "weak"
    PARETO = "pareto"


Endpoint = Union[Fraction, IsolatingInterval]


def _below(e: Endpoint) -> Fraction:
    return e.lo if isinstance(e, IsolatingInterval) else e


def _above(e: Endpoint) -> Fraction:
    return e.hi if isinstance(e, IsolatingInterval) else e


def _endpoint_dict(e: Endpoint):
    return e.to_dict() if isinstance(e, IsolatingInterval) else format_rational(e)


@dataclass(frozen=True)
class OpenInterval:
    """Parameter interval; only the endpoints 0 and 1 can be closed."""

    lo: Endpoint
    hi: Endpoint
    lo_closed: bool = False
    hi_closed: bool = False
    index: int = -1

    kind = "interval"

    def rational_bounds(self) -> Tuple[Fraction, Fraction]:
        """Rational bounds of the cell, tightened past irrational endpoints."""
        return _above(self.lo), _below(self.hi)

    def sample(self) -> Fraction:
        lo, hi = self.rational_bounds()
        return (lo + hi) / 2

    def samples(self, count: int) -> List[Fraction]:
        lo, hi = self.rational_bounds()
        return [lo + (hi - lo) * Fraction(k, count + 1) for k in range(1, count + 1)]

    def contains(self, t) -> bool:
        t = to_rational(t)
        lower = t > _above(self.lo) or (self.lo_closed and t == self.lo)
        upper = t < _below(self.hi) or (self.hi_closed and t == self.hi)
        return lower and upper

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        lo = format_rational(self.lo) if isinstance(self.lo, Fraction) else f"~{float(self.lo.approx):.6f}"
        hi = format_rational(self.hi) if isinstance(self.hi, Fraction) else f"~{float(self.hi.approx):.6f}"
        return f"{left}{lo}, {hi}{right}"

    def to_dict(self):
        return {
            "index": self.index,
            "kind": self.kind,
            "lo": _endpoint_dict(self.lo),
            "hi": _endpoint_dict(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }


@dataclass(frozen=True)
class PointCell:
    value: Endpoint
    index: int = -1

    kind = "point"

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def sample(self) -> Fraction:
        if not self.is_exact:
            raise IrrationalCriticalValueError("an irrational parameter has no exact sample")
        return self.value

    def __str__(self) -> str:
        if self.is_exact:
            return "{" + format_rational(self.value) + "}"
        return "{~" + f"{self.value.approx:.6f}" + "}"

    def to_dict(self):
        return {"index": self.index, "kind": self.kind, "value": _endpoint_dict(self.value)}


ParamCell = Union[OpenInterval, PointCell]


@dataclass(frozen=True)
class RationalCurve:
    coords: Tuple[Tuple[UniPoly, UniPoly], ...]
    domain: OpenInterval

    def at(self, t) -> Vector:
        t = to_rational(t)
        return Vector(tuple(num(t) / den(t) for num, den in self.coords))

    def to_dict(self):
        return {
            "cell": self.domain.index,
            "coords": [
                {"num": [format_rational(c) for c in num.coeffs], "den": [format_rational(c) for c in den.coeffs]}
                for num, den in self.coords
            ],
        }


@dataclass(frozen=True)
class Bounded:
    point: Optional[Vector]


@dataclass(frozen=True)
class Divergent:
    pass


DIVERGENT = Divergent()


@dataclass(frozen=True)
class CurveGeometry:
    curve: RationalCurve

    kind = "curve"


@dataclass(frozen=True)
class FixedSetGeometry:
    piece: PatternPiece
    value: Fraction

    kind = "fixed"


@dataclass(frozen=True)
class SolutionPiece:
    cell: ParamCell
    pattern: ActivePattern
    geometry: Union[CurveGeometry, FixedSetGeometry]
    id: int = -1

    @property
    def is_curve(self) -> bool:
        return isinstance(self.geometry, CurveGeometry)

    def witness(self) -> Vector:
        if self.is_curve:
            return self.geometry.curve.at(self.cell.sample())
        return self.geometry.piece.witness()

    def to_dict(self):
        out = {"id": self.id, "cell": self.cell.index, "pattern": str(self.pattern), "kind": self.geometry.kind}
        if self.is_curve:
            out["curve"] = self.geometry.curve.to_dict()
        else:
            out["parameter"] = format_rational(self.geometry.value)
            out["dimension"] = self.geometry.piece.dimension
            out["xset"] = self.geometry.piece.xset.to_dict()
        out["witness"] = self.witness().to_list()
        return out


def _reduce_fraction(num: UniPoly, den: UniPoly) -> Tuple[UniPoly, UniPoly]:
    if num.is_zero:
        return UniPoly(), UniPoly.constant(1)
    common = num.gcd(den)
    num, den = num.exact_div(common), den.exact_div(common)
    scale = 1 / den.leading
    return num * scale, den * scale


def _content(row: Sequence[UniPoly]) -> UniPoly:
    nonzero = [e for e in row if not e.is_zero]
    if not nonzero:
        return UniPoly.constant(1)
    return reduce(lambda a, b: a.gcd(b), nonzero[1:], nonzero[0].monic())


def parametric_echelon(rows: List[List[UniPoly]], rhs: List[UniPoly]):
    """Fraction-free elimination over Q[t].

    Returns (pivots, contents, residuals): wherever no pivot or removed
    content vanishes, the system is consistent iff every residual vanishes.
    """

    work = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    active = list(range(len(work)))
    pivots, contents = [], []
    for c in range(ncols):
        candidates = [i for i in active if not work[i][c].is_zero]
        if not candidates:
            continue
        p = min(candidates, key=lambda i: (work[i][c].degree, i))
        active.remove(p)
        pivot = work[p][c]
        pivots.append(pivot)
        for i in active:
            factor = work[i][c]
            if factor.is_zero:
                continue
            new = [pivot * a - factor * b for a, b in zip(work[i], work[p])]
            common = _content(new)
            if common.degree >= 1:
                contents.append(common)
                new = [e.exact_div(common) for e in new]
            work[i] = new
    residuals = [work[i][-1] for i in active]
    return pivots, contents, residuals


@dataclass
class PatternBlock:
    pattern: ActivePattern
    free: Tuple[int, ...]
    basis: Tuple[int, ...]
    rows: List[List[UniPoly]]
    rhs: List[UniPoly]
    det: UniPoly = field(default_factory=UniPoly)
    numerators: Tuple[UniPoly, ...] = ()
    conditions: Tuple[Tuple[str, int, UniPoly], ...] = ()
    coords: Tuple[Tuple[UniPoly, UniPoly], ...] = ()
    candidates: Tuple[UniPoly, ...] = ()
    consistent: bool = False

    @property
    def degenerate(self) -> bool:
        return self.det.is_zero

    def numeric(self, t: Fraction):
        return (
            Matrix.from_rows([[e(t) for e in row] for row in self.rows]),
            Vector(tuple(e(t) for e in self.rhs)),
        )


def decompose_cells(criticals: Sequence, mode: Mode = Mode.WEAK) -> List[ParamCell]:

    mode = Mode(mode)
    values = [c.value if isinstance(c, ExactRational) else c for c in criticals]
    values = [to_rational(v) if not isinstance(v, IsolatingInterval) else v for v in values]
    for a, b in zip(values, values[1:]):
        both_exact = isinstance(a, Fraction) and isinstance(b, Fraction)
        if (both_exact and b <= a) or _below(b) < _above(a):
            raise ValueError("critical values must be sorted and distinct")

    weak = mode == Mode.WEAK
    cells: List[ParamCell] = []
    lo: Endpoint = Fraction(0)
    lo_closed = weak
    for v in values:
        at_zero = isinstance(v, Fraction) and v == 0
        if not at_zero:
            cells.append(OpenInterval(lo, v, lo_closed, False))
        if weak or not (isinstance(v, Fraction) and v in (0, 1)):
            cells.append(PointCell(v))
        lo, lo_closed = v, False
    if not (isinstance(lo, Fraction) and lo == 1 and values):
        cells.append(OpenInterval(lo, Fraction(1), lo_closed, weak))
    return [replace(cell, index=k) for k, cell in enumerate(cells)]


def limit_at(curve: RationalCurve, endpoint) -> Union[Bounded, Divergent]:

    cell = curve.domain
    if not isinstance(endpoint, IsolatingInterval):
        endpoint = to_rational(endpoint)
    if endpoint != cell.lo and endpoint != cell.hi:
        raise ValueError(f"{endpoint} is not an endpoint of the curve domain {cell}")

    if isinstance(endpoint, IsolatingInterval):
        if any(endpoint.contains_root_of(den) for _, den in curve.coords):
            return DIVERGENT
        return Bounded(None)

    if any(den(endpoint) == 0 for _, den in curve.coords):
        return DIVERGENT
    return Bounded(curve.at(endpoint))


class BicriteriaSweep:
    """Parametric analysis of a bicriteria problem over xi = (t, 1 - t)."""

    def __init__(self, problem: AvviProblem, exact: bool = True, width=ROOT_WIDTH):
        require_bicriteria(problem, "the parametric sweep")
        if not exact and not is_monotone(problem):
            raise UnsupportedProblemError("degraded sweep mode relies on convex solution sets; the problem is not monotone")
        self.problem = problem
        self.exact = exact
        self.width = width
        self.op1, self.op2 = problem.operators
        self._blocks: Optional[List[PatternBlock]] = None
        self._criticals: Optional[List[Root]] = None
        self._pieces = {}

        self.feasible_region = True
        self.implicit = EMPTY_PATTERN
        if not problem.is_unconstrained:
            K = problem.constraint
            self.feasible_region = bool(is_feasible(LinIneqSystem(K.n, (), tuple(K.row(i) for i in range(K.p)))))
            if self.feasible_region:
                self.implicit = implicit_equalities(K)

    def weight(self, t) -> Weight:
        return Weight.bicriteria(t)

    def operator_at(self, t):
        return scalarize(self.problem, self.weight(t))

    def patterns(self) -> List[ActivePattern]:

        if self.problem.is_unconstrained:
            return [EMPTY_PATTERN]
        if not self.feasible_region:
            return []
        K = self.problem.constraint
        if K.p > MAX_PATTERN_CONSTRAINTS:
            raise UnsupportedProblemError(f"p={K.p} exceeds the pattern limit {MAX_PATTERN_CONSTRAINTS}")
        out = []
        for mask in range(1 << K.p):
            pattern = ActivePattern(mask)
            if not pattern.issuperset(self.implicit):
                continue
            if is_feasible(pseudo_face_system(K, pattern)):
                out.append(pattern)
        return out

    def _basis_rows(self) -> Tuple[int, ...]:
        K = self.problem.constraint
        basis: List[int] = []
        for i in self.implicit.indices:
            trial = Matrix.from_rows([list(K.A.row(j - 1)) for j in basis + [i]])
            if rank(trial) > len(basis):
                basis.append(i)
        return tuple(basis)

    def _poly_block(self, pattern: ActivePattern, basis: Tuple[int, ...]) -> PatternBlock:

        n = self.problem.n
        M1, M2 = self.op1.M, self.op2.M
        q1, q2 = self.op1.q, self.op2.q
        free = tuple(i for i in pattern.indices if i not in self.implicit)
        multipliers = free + basis

        rows, rhs = [], []
        for r in range(n):
            row = [UniPoly.linear(M2[r, j], M1[r, j] - M2[r, j]) for j in range(n)]
            row += [UniPoly.constant(-self.problem.constraint.A[i - 1, r]) for i in multipliers]
            rows.append(row)
            rhs.append(UniPoly.linear(-q2[r], -(q1[r] - q2[r])))
        for i in multipliers:
            A = self.problem.constraint.A
            rows.append([UniPoly.constant(A[i - 1, j]) for j in range(n)] + [UniPoly()] * len(multipliers))
            rhs.append(UniPoly.constant(self.problem.constraint.b[i - 1]))
        return PatternBlock(pattern, free, basis, rows, rhs)

    def _analyze_block(self, block: PatternBlock) -> PatternBlock:

        n = self.problem.n
        size = len(block.rows)
        nodes = [Fraction(k) for k in range(n + 1)]
        dets, values = [], [[] for _ in range(size)]
        for t in nodes:
            K_t, rhs_t = block.numeric(t)
            d = determinant(K_t)
            dets.append(d)
            if d != 0:
                z = solve_affine_system(K_t, rhs_t).base
                for j in range(size):
                    values[j].append(d * z[j])
            else:
                for j in range(size):
                    replaced = [list(row) for row in K_t.to_rows()]
                    for r in range(size):
                        replaced[r][j] = rhs_t[r]
                    values[j].append(determinant(Matrix.from_rows(replaced)))
        block.det = lagrange_interpolate(nodes, dets)

        if block.degenerate:
            pivots, contents, residuals = parametric_echelon(block.rows, block.rhs)
            block.consistent = all(r.is_zero for r in residuals)
            if not block.consistent:
                common = reduce(lambda a, b: a.gcd(b), [r for r in residuals if not r.is_zero])
                block.candidates = tuple(pivots) + tuple(contents) + (common,)
            logger.info(f"Pattern {block.pattern}: singular KKT block, generically {'consistent' if block.consistent else 'inconsistent'}")
            return block

        block.numerators = tuple(lagrange_interpolate(nodes, values[j]) for j in range(size))
        K = None if self.problem.is_unconstrained else self.problem.constraint
        conditions = []
        if K is not None:
            for i in range(K.p):
                if (i + 1) in block.pattern:
                    continue
                S = sum((block.numerators[j] * K.A[i, j] for j in range(n)), UniPoly()) - block.det * K.b[i]
                conditions.append(("strict", i + 1, S))
            for l, i in enumerate(block.free):
                conditions.append(("multiplier", i, block.numerators[n + l]))
        block.conditions = tuple(conditions)
        block.coords = tuple(_reduce_fraction(block.numerators[j], block.det) for j in range(n))
        return block

    @property
    def blocks(self) -> List[PatternBlock]:
        if self._blocks is None:
            if self.problem.is_unconstrained:
                raw = [self._unconstrained_block()]
            else:
                basis = self._basis_rows()
                raw = [self._poly_block(pattern, basis) for pattern in self.patterns()]
            self._blocks = parallel_map(self._analyze_block, raw)
            logger.info(f"Analyzed {len(self._blocks)} pattern block(s)")
        return self._blocks

    def _unconstrained_block(self) -> PatternBlock:
        n = self.problem.n
        M1, M2 = self.op1.M, self.op2.M
        q1, q2 = self.op1.q, self.op2.q
        rows = [[UniPoly.linear(M2[r, j], M1[r, j] - M2[r, j]) for j in range(n)] for r in range(n)]
        rhs = [UniPoly.linear(-q2[r], -(q1[r] - q2[r])) for r in range(n)]
        return PatternBlock(EMPTY_PATTERN, (), (), rows, rhs)

    def _solvable_at(self, pattern: ActivePattern, t: Fraction) -> bool:
        op = self.operator_at(t)
        if self.problem.is_unconstrained:
            return not solve_avi(op, self.problem.constraint).is_empty
        return solve_pattern(op, self.problem.constraint, pattern) is not None

    def critical_values(self) -> List[Root]:

        if self._criticals is not None:
            return self._criticals

        polys = []
        for block in self.blocks:
            if not block.degenerate:
                polys.append(block.det)
                polys.extend(c for _, _, c in block.conditions if not c.is_zero)
                continue
            if block.consistent:
                raise UnsupportedProblemError(
                    f"pattern {block.pattern} has a singular KKT block that is consistent on whole parameter intervals"
                )
            for cand in block.candidates:
                if cand.is_zero or cand.degree < 1:
                    continue
                kept = cand.sqf_part()
                for r in rational_roots(cand):
                    if 0 <= r <= 1 and self._solvable_at(block.pattern, r):
                        continue
                    kept = kept.exact_div(UniPoly.linear(-r, 1))
                polys.append(kept)

        roots = merge_roots(polys, 0, 1, self.width)
        irrational = [r for r in roots if not r.is_exact]
        if irrational:
            if self.exact:
                raise IrrationalCriticalValueError(
                    f"{len(irrational)} irrational critical value(s) near "
                    + ", ".join(f"{r.approx:.6f}" for r in irrational)
                )
            logger.warning(f"Degraded sweep: {len(irrational)} irrational critical value(s), point sets there are not computed")
        self._criticals = roots
        logger.info(f"Critical values: {[format_rational(r.value) if r.is_exact else round(r.approx, 6) for r in roots]}")
        return roots

    def cells(self, mode: Mode = Mode.WEAK) -> List[ParamCell]:
        return decompose_cells(self.critical_values(), mode)

    def _check_condition(self, poly: UniPoly, cell: OpenInterval, what: str):

        if poly.is_zero:
            return
        a, b = _above(cell.lo), _below(cell.hi)
        inside = count_roots_open(poly, a, b)
        if (cell.lo_closed or isinstance(cell.lo, IsolatingInterval)) and poly(a) == 0:
            inside += 1
        if (cell.hi_closed or isinstance(cell.hi, IsolatingInterval)) and poly(b) == 0:
            inside += 1
        if inside:
            raise SweepInvariantError(f"{what} vanishes inside cell {cell}; it was not accounted among the critical values")

    def curve_pieces(self, cell: OpenInterval) -> List[SolutionPiece]:

        if not isinstance(cell, OpenInterval):
            raise ValueError("curve pieces live on interval cells")
        self.critical_values()
        t = cell.sample()
        n = self.problem.n
        out = []
        for block in self.blocks:
            if block.degenerate:
                continue
            D = block.det(t)
            if D == 0:
                raise SweepInvariantError(f"pattern {block.pattern} block is singular at the sample {format_rational(t)}")
            self._check_condition(block.det, cell, f"determinant of pattern {block.pattern}")
            holds = True
            for kind, index, poly in block.conditions:
                self._check_condition(poly, cell, f"{kind} condition {index} of pattern {block.pattern}")
                value = poly(t) / D
                if (kind == "strict" and value <= 0) or (kind == "multiplier" and value < 0):
                    holds = False
            if not holds:
                continue
            curve = RationalCurve(block.coords, cell)
            out.append(SolutionPiece(cell, block.pattern, CurveGeometry(curve)))
        return sorted(out, key=lambda piece: piece.pattern)

    def point_pieces(self, cell: PointCell) -> List[SolutionPiece]:

        if not isinstance(cell, PointCell):
            raise ValueError("point pieces live on point cells")
        if not cell.is_exact:
            if self.exact:
                raise IrrationalCriticalValueError("point cells at irrational parameters are not solved in exact mode")
            return []
        solution = solve_avi(self.operator_at(cell.value), self.problem.constraint)
        return [SolutionPiece(cell, piece.pattern, FixedSetGeometry(piece, cell.value)) for piece in solution.pieces]

    def pieces(self, mode: Mode = Mode.WEAK) -> List[SolutionPiece]:

        mode = Mode(mode)
        if mode in self._pieces:
            return self._pieces[mode]

        def solve_cell(cell):
            if isinstance(cell, OpenInterval):
                return self.curve_pieces(cell)
            return self.point_pieces(cell)

        cells = self.cells(mode)
        per_cell = parallel_map(solve_cell, cells)
        ordered = [piece for group in per_cell for piece in group]
        pieces = [replace(piece, id=k) for k, piece in enumerate(ordered)]
        logger.info(f"{mode.value} sweep: {len(cells)} cells, {len(pieces)} pieces")
        self._pieces[mode] = pieces
        return pieces


def critical_values(problem: AvviProblem, exact: bool = True) -> List[Root]:
    return BicriteriaSweep(problem, exact=exact).critical_values()


def curve_pieces(problem: AvviProblem, cell: OpenInterval) -> List[SolutionPiece]:
    return BicriteriaSweep(problem).curve_pieces(cell)


def point_pieces(problem: AvviProblem, cell: PointCell) -> List[SolutionPiece]:
    return BicriteriaSweep(problem).point_pieces(cell)
