from fractions import Fraction

import numpy as np
import pytest

from avvi.exact_linalg import Matrix, Vector
from avvi.instances import gen_family
from avvi.model import AffineOperator, AvviProblem, Polyhedron


def rat(value) -> Fraction:
    return Fraction(value)


def vec(*entries) -> Vector:
    return Vector(tuple(Fraction(x) for x in entries))


def problem_of(matrices, qs, A=None, b=None) -> AvviProblem:
    operators = tuple(AffineOperator(Matrix.from_rows(M), Vector(tuple(q))) for M, q in zip(matrices, qs))
    if A is None:
        return AvviProblem(operators)
    return AvviProblem(operators, Polyhedron(Matrix.from_rows(A), Vector(tuple(b))))


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def p1_n2():
    return gen_family(2, 0)


@pytest.fixture
def p1_n4():
    return gen_family(4, 0)


@pytest.fixture
def ps_n2():
    return gen_family(2, 1)


@pytest.fixture
def pp_n4_p2():
    return gen_family(4, 2)


@pytest.fixture
def constant_problem():
    """Both criteria equal; the unique solution is (-1, 1) for every weight."""
    J = [[0, 1], [-1, 0]]
    return problem_of([J, J], [(-1, -1), (-1, -1)])


@pytest.fixture
def box_problem():
    """Identity operator pulled towards (2, 2) and (-1, 3) on the unit box."""
    I = [[1, 0], [0, 1]]
    A = [[1, 0], [-1, 0], [0, 1], [0, -1]]
    b = [0, -1, 0, -1]
    return problem_of([I, I], [(-2, -2), (1, -3)], A, b)


@pytest.fixture
def irrational_problem():
    """Skew pencil with Pfaffian 2t^2 - 1, so the only critical value is 1/sqrt(2)."""
    M1 = [[0, 2, 0, 1], [-2, 0, -1, 0], [0, 1, 0, 1], [-1, 0, -1, 0]]
    M2 = [[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]]
    q = (1, 0, 0, 0)
    return problem_of([M1, M2], [q, q])
