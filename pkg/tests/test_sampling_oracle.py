from fractions import Fraction

import pytest

from avvi.avi_solver import solution_at
from avvi.instances import lift_criterion
from avvi.model import Weight
from avvi.parametric_sweep import Mode
from avvi.sampling_oracle import OracleReport, SamplingOracle, grid_resolution, sampling_oracle, simplex_grid
from tests.conftest import problem_of


@pytest.fixture
def plane_problem():
    """Zero operators: every point of the plane solves every scalarization."""
    Z = [[0, 0], [0, 0]]
    return problem_of([Z, Z], [(0, 0), (0, 0)])


@pytest.mark.oracle
def test_grid_resolution():
    assert grid_resolution(2, 50) == 50
    assert grid_resolution(3, 10) == 3
    assert grid_resolution(1, 10) == 1


@pytest.mark.oracle
def test_simplex_grid():
    weights = simplex_grid(2, 4)
    assert [w.xi[0] for w in weights] == [0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1]
    assert len(simplex_grid(3, 3)) == 10
    assert [w.xi for w in simplex_grid(3, 3, interior=True)] == [(Fraction(1, 3),) * 3]


@pytest.mark.oracle
def test_oracle_rejects_bad_parameters(p1_n2):
    with pytest.raises(ValueError):
        SamplingOracle(p1_n2, grid=0)
    with pytest.raises(ValueError):
        SamplingOracle(p1_n2, eps=0)


@pytest.mark.oracle
def test_oracle_weights_include_criticals(p1_n2):
    oracle = SamplingOracle(p1_n2, grid=3)
    assert [w.xi[0] for w in oracle.weights()] == [0, Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), 1]
    pareto = SamplingOracle(p1_n2, grid=3, mode=Mode.PARETO)
    assert [w.xi[0] for w in pareto.weights()] == [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]


@pytest.mark.oracle
def test_constant_problem_is_one_cluster(constant_problem):
    report = sampling_oracle(constant_problem, grid=20)
    assert isinstance(report, OracleReport)
    assert report.count == 1
    assert report.points == 21
    assert report.heuristic
    assert not report.clipped


@pytest.mark.oracle
def test_skew_family_has_two_branches(p1_n2):
    report = sampling_oracle(p1_n2, grid=400)
    assert report.count == 2
    assert report.grid_resolution == 400


@pytest.mark.oracle
def test_three_criteria_use_grid_neighbours(p1_n2):
    report = sampling_oracle(lift_criterion(p1_n2), grid=100)
    assert report.grid_resolution == 12
    assert report.count == 2


@pytest.mark.oracle
def test_unbounded_pieces_are_clipped(plane_problem):
    oracle = SamplingOracle(plane_problem, grid=10, eps=0.5, clip=1)
    (piece,) = solution_at(plane_problem, Weight.bicriteria("1/2")).pieces
    points = oracle.piece_points(piece)
    assert len(points) == 81
    assert oracle.clipped

    capped = SamplingOracle(plane_problem, eps=0.5, clip=1, max_piece_points=10)
    assert len(capped.piece_points(piece)) == 10

    report = oracle.run()
    assert report.count == 1
    assert report.clipped
