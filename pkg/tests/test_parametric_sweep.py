from fractions import Fraction

import pytest

from avvi.avi_solver import is_vi_solution
from avvi.instances import gen_family, ground_truth, lift_criterion
from avvi.model import EMPTY_PATTERN, ActivePattern, UnsupportedProblemError, Weight, scalarize
from avvi.parametric_sweep import (
    DIVERGENT,
    BicriteriaSweep,
    Bounded,
    IrrationalCriticalValueError,
    Mode,
    OpenInterval,
    PointCell,
    critical_values,
    decompose_cells,
    limit_at,
    parametric_echelon,
)
from avvi.polynomials import ExactRational, IsolatingInterval, UniPoly
from tests.conftest import problem_of, vec

HALF = Fraction(1, 2)


def exact_values(roots):
    return [r.value for r in roots]


@pytest.mark.sweep
def test_critical_values_of_family_members(p1_n2, p1_n4, pp_n4_p2):
    assert exact_values(critical_values(p1_n2)) == [HALF]
    assert exact_values(critical_values(p1_n4)) == [HALF, Fraction(2, 3)]
    assert exact_values(critical_values(pp_n4_p2)) == [HALF, Fraction(2, 3)]


@pytest.mark.sweep
def test_constant_problem_has_no_critical_values(constant_problem):
    assert critical_values(constant_problem) == []


@pytest.mark.sweep
def test_box_critical_values_come_from_constraints(box_problem):
    assert exact_values(critical_values(box_problem)) == [Fraction(1, 3), Fraction(2, 3)]


@pytest.mark.sweep
def test_critical_values_match_ground_truth():
    for n in (2, 4, 6):
        assert tuple(exact_values(critical_values(gen_family(n)))) == ground_truth(n).criticals


@pytest.mark.sweep
def test_decompose_weak_cells():
    cells = decompose_cells([HALF], Mode.WEAK)
    assert [str(c) for c in cells] == ["[0, 1/2)", "{1/2}", "(1/2, 1]"]
    assert [c.index for c in cells] == [0, 1, 2]


@pytest.mark.sweep
def test_decompose_pareto_cells():
    cells = decompose_cells([HALF], Mode.PARETO)
    assert [str(c) for c in cells] == ["(0, 1/2)", "{1/2}", "(1/2, 1)"]


@pytest.mark.sweep
def test_decompose_without_criticals():
    assert [str(c) for c in decompose_cells([], Mode.WEAK)] == ["[0, 1]"]
    assert [str(c) for c in decompose_cells([], "pareto")] == ["(0, 1)"]


@pytest.mark.sweep
def test_decompose_with_critical_endpoints():
    weak = decompose_cells([Fraction(0), HALF, Fraction(1)], Mode.WEAK)
    assert [str(c) for c in weak] == ["{0}", "(0, 1/2)", "{1/2}", "(1/2, 1)", "{1}"]
    pareto = decompose_cells([ExactRational(Fraction(0)), ExactRational(Fraction(1))], Mode.PARETO)
    assert [str(c) for c in pareto] == ["(0, 1)"]


@pytest.mark.sweep
def test_decompose_rejects_unsorted_values():
    with pytest.raises(ValueError):
        decompose_cells([HALF, Fraction(1, 3)])
    with pytest.raises(ValueError):
        decompose_cells([HALF, HALF])


@pytest.mark.sweep
def test_interval_cell_geometry():
    cell = OpenInterval(Fraction(0), HALF, True, False)
    assert cell.contains(0)
    assert not cell.contains(HALF)
    assert cell.sample() == Fraction(1, 4)
    assert cell.samples(3) == [Fraction(1, 8), Fraction(1, 4), Fraction(3, 8)]


@pytest.mark.sweep
def test_curve_pieces_follow_ground_truth(p1_n4):
    sweep = BicriteriaSweep(p1_n4)
    truth = ground_truth(4)
    first = sweep.cells(Mode.WEAK)[0]
    pieces = sweep.curve_pieces(first)
    assert len(pieces) == 1
    curve = pieces[0].geometry.curve
    assert curve.at(Fraction(1, 4)) == vec(2, "4/5", "-4/5", -2)
    for t in first.samples(5):
        assert curve.at(t) == truth.curve_at(t)


@pytest.mark.sweep
def test_curve_pieces_on_right_branch(p1_n2):
    sweep = BicriteriaSweep(p1_n2)
    last = sweep.cells(Mode.WEAK)[-1]
    (piece,) = sweep.curve_pieces(last)
    assert piece.pattern == EMPTY_PATTERN
    assert piece.geometry.curve.at(Fraction(3, 4)) == vec(-2, 2)


@pytest.mark.sweep
def test_curve_points_solve_the_scalarized_problem(box_problem, pp_n4_p2):
    for problem in (box_problem, pp_n4_p2):
        sweep = BicriteriaSweep(problem)
        for cell in sweep.cells(Mode.WEAK):
            if not isinstance(cell, OpenInterval):
                continue
            for piece in sweep.curve_pieces(cell):
                for t in cell.samples(4):
                    x = piece.geometry.curve.at(t)
                    assert is_vi_solution(scalarize(problem, Weight.bicriteria(t)), problem.constraint, x)


@pytest.mark.sweep
def test_box_patterns_along_the_sweep(box_problem):
    pieces = BicriteriaSweep(box_problem).pieces(Mode.WEAK)
    assert [str(p.pattern) for p in pieces] == ["{1,4}", "{1,4}", "{4}", "{2,4}", "{2,4}"]
    assert [p.is_curve for p in pieces] == [True, False, True, False, True]
    assert [p.id for p in pieces] == [0, 1, 2, 3, 4]


@pytest.mark.sweep
def test_point_pieces_of_singular_weight(p1_n2):
    sweep = BicriteriaSweep(p1_n2)
    cell = sweep.cells(Mode.WEAK)[1]
    assert isinstance(cell, PointCell)
    assert sweep.point_pieces(cell) == []


@pytest.mark.sweep
def test_point_piece_is_a_line(ps_n2):
    sweep = BicriteriaSweep(ps_n2)
    cell = sweep.cells(Mode.WEAK)[1]
    (piece,) = sweep.point_pieces(cell)
    assert piece.pattern == ActivePattern.of([1])
    assert piece.geometry.piece.dimension == 1
    assert piece.geometry.piece.contains(vec(5, -4))


@pytest.mark.sweep
def test_point_piece_follows_ground_truth_line(pp_n4_p2):
    truth = ground_truth(4, 2)
    assert truth.line_base(2) == vec(-3, 0, 1, 3)
    sweep = BicriteriaSweep(pp_n4_p2)
    cell = sweep.cells(Mode.WEAK)[3]
    assert cell.value == Fraction(2, 3)
    (piece,) = sweep.point_pieces(cell)
    assert piece.geometry.piece.dimension == 1
    for t in (-2, 0, 5):
        assert piece.geometry.piece.contains(truth.line_point(2, t))


@pytest.mark.sweep
def test_pieces_use_canonical_ids(ps_n2):
    pieces = BicriteriaSweep(ps_n2).pieces(Mode.WEAK)
    assert [p.id for p in pieces] == [0, 1, 2]
    assert [p.geometry.kind for p in pieces] == ["curve", "fixed", "curve"]
    assert [p.cell.index for p in pieces] == [0, 1, 2]


@pytest.mark.sweep
def test_limits_at_endpoints(p1_n2):
    sweep = BicriteriaSweep(p1_n2)
    last = sweep.cells(Mode.WEAK)[-1]
    curve = sweep.curve_pieces(last)[0].geometry.curve
    assert limit_at(curve, HALF) is DIVERGENT
    assert limit_at(curve, 1) == Bounded(vec(-1, 1))
    with pytest.raises(ValueError):
        limit_at(curve, Fraction(3, 4))


@pytest.mark.sweep
def test_constant_curve_is_bounded_everywhere(constant_problem):
    sweep = BicriteriaSweep(constant_problem)
    (cell,) = sweep.cells(Mode.WEAK)
    (piece,) = sweep.curve_pieces(cell)
    assert limit_at(piece.geometry.curve, 0) == Bounded(vec(-1, 1))
    assert limit_at(piece.geometry.curve, 1) == Bounded(vec(-1, 1))


@pytest.mark.sweep
def test_irrational_critical_value_is_refused_in_exact_mode(irrational_problem):
    with pytest.raises(IrrationalCriticalValueError):
        critical_values(irrational_problem)


@pytest.mark.sweep
def test_degraded_mode_isolates_the_irrational_value(irrational_problem):
    (root,) = critical_values(irrational_problem, exact=False)
    assert isinstance(root, IsolatingInterval)
    assert root.lo < Fraction(7072, 10000)
    assert root.hi > Fraction(7071, 10000)

    sweep = BicriteriaSweep(irrational_problem, exact=False)
    pieces = sweep.pieces(Mode.WEAK)
    assert [p.is_curve for p in pieces] == [True, True]
    for piece in pieces:
        assert limit_at(piece.geometry.curve, root) is DIVERGENT


@pytest.mark.sweep
def test_degraded_mode_needs_monotone_operators():
    N = [[-1, 0], [0, -1]]
    with pytest.raises(UnsupportedProblemError):
        BicriteriaSweep(problem_of([N, N], [(0, 0), (0, 0)]), exact=False)


@pytest.mark.sweep
def test_singular_consistent_block_is_unsupported():
    Z = [[0, 0], [0, 0]]
    with pytest.raises(UnsupportedProblemError):
        critical_values(problem_of([Z, Z], [(0, 0), (0, 0)]))


@pytest.mark.sweep
def test_sweep_needs_two_criteria(p1_n2):
    with pytest.raises(UnsupportedProblemError):
        BicriteriaSweep(lift_criterion(p1_n2))


@pytest.mark.sweep
def test_singular_block_candidates(ps_n2):
    sweep = BicriteriaSweep(ps_n2)
    singular = [block for block in sweep.blocks if block.degenerate]
    assert [str(block.pattern) for block in singular] == ["{1}"]
    assert not singular[0].consistent


@pytest.mark.sweep
def test_parametric_echelon_residual():
    t = UniPoly.linear(0, 1)
    one = UniPoly.constant(1)
    # t*x = 1 and x = 1 agree only at t = 1
    pivots, contents, residuals = parametric_echelon([[t], [one]], [one, one])
    assert pivots == [one]
    assert contents == [UniPoly.linear(-1, 1)]
    assert residuals == [UniPoly.constant(-1)]
