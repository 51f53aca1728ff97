from fractions import Fraction

import pytest

from avvi.config import ROOT_WIDTH
from avvi.polynomials import (
    ExactRational,
    IsolatingInterval,
    UniPoly,
    ZeroPolynomialError,
    count_roots,
    count_roots_open,
    isolate_roots,
    lagrange_interpolate,
    merge_roots,
    multiplicity_at,
    rational_roots,
)


@pytest.mark.exact
def test_trailing_zeros_are_trimmed():
    p = UniPoly((1, 0, 0))
    assert p.coeffs == (Fraction(1),)
    assert p.degree == 0
    assert UniPoly().is_zero
    assert UniPoly().degree == float("-inf")


@pytest.mark.exact
def test_evaluation_and_arithmetic():
    p = UniPoly((-2, 0, 1))
    assert p(3) == 7
    assert p("1/2") == Fraction(-7, 4)
    assert UniPoly.linear(-1, 1) * UniPoly.linear(1, 1) == UniPoly((-1, 0, 1))
    assert (p - p).is_zero
    assert p * Fraction(1, 2) == UniPoly((-1, 0, Fraction(1, 2)))
    assert p.derivative() == UniPoly((0, 2))


@pytest.mark.exact
def test_gcd_is_monic_and_exact_division():
    p = UniPoly((-1, 0, 1))
    q = UniPoly((-2, 2))
    assert p.gcd(q) == UniPoly((-1, 1))
    assert p.exact_div(UniPoly((1, 1))) == UniPoly((-1, 1))
    with pytest.raises(ValueError):
        p.exact_div(UniPoly((2, 1)))


@pytest.mark.exact
def test_lagrange_interpolation_recovers_square():
    assert lagrange_interpolate([0, 1, 2], [1, 1, 9]) == UniPoly((1, -4, 4))


@pytest.mark.exact
def test_lagrange_interpolation_rejects_repeated_nodes():
    with pytest.raises(ValueError):
        lagrange_interpolate([0, 0], [1, 2])


@pytest.mark.exact
def test_rational_roots():
    p = UniPoly((1, -5, 6))
    assert rational_roots(p) == [Fraction(1, 3), Fraction(1, 2)]
    assert rational_roots(UniPoly((-2, 0, 1))) == []
    assert rational_roots(UniPoly((0, 0, 1))) == [Fraction(0)]


@pytest.mark.exact
def test_multiplicity():
    p = UniPoly.linear(-1, 2) * UniPoly.linear(-1, 2)
    assert multiplicity_at(p, Fraction(1, 2)) == 2
    assert multiplicity_at(p, Fraction(1, 3)) == 0


@pytest.mark.exact
def test_count_roots_closed_and_open():
    p = UniPoly.linear(-1, 2)
    assert count_roots(p, 0, Fraction(1, 2)) == 1
    assert count_roots_open(p, 0, Fraction(1, 2)) == 0
    assert count_roots_open(p, 0, 1) == 1


@pytest.mark.exact
def test_zero_polynomial_is_rejected():
    with pytest.raises(ZeroPolynomialError):
        count_roots(UniPoly(), 0, 1)
    with pytest.raises(ZeroPolynomialError):
        isolate_roots(UniPoly(), 0, 1)


@pytest.mark.exact
def test_isolate_irrational_root():
    roots = isolate_roots(UniPoly((-2, 0, 1)), 0, 2)
    assert len(roots) == 1
    root = roots[0]
    assert isinstance(root, IsolatingInterval)
    assert not root.is_exact
    assert root.lo * root.lo < 2 < root.hi * root.hi
    assert root.hi - root.lo <= ROOT_WIDTH
    assert abs(root.approx - 2 ** 0.5) < 1e-5

    crowded = UniPoly((-2, 0, 1)) * UniPoly((-3, 0, 1)) * UniPoly((-5, 0, 1)) * UniPoly.linear(-707, 500)
    roots = isolate_roots(crowded, -3, 3)
    assert len(roots) == 7
    assert [r.is_exact for r in roots].count(True) == 1
    for left, right in zip(roots, roots[1:]):
        assert left.upper < right.lower
    for r in roots:
        assert crowded(r.value) == 0 if r.is_exact else count_roots(crowded, r.lower, r.upper) == 1

    coarse = isolate_roots(crowded, -3, 3, width=1)
    assert len(coarse) == 7
    for left, right in zip(coarse, coarse[1:]):
        assert left.upper < right.lower
    for r in coarse:
        assert crowded(r.value) == 0 if r.is_exact else count_roots(crowded, r.lower, r.upper) == 1


@pytest.mark.exact
def test_isolate_reports_rational_multiplicity():
    p = UniPoly.linear(-1, 2) * UniPoly.linear(-1, 2) * UniPoly.linear(-1, 3)
    roots = isolate_roots(p, 0, 1)
    assert roots == [ExactRational(Fraction(1, 3), 1), ExactRational(Fraction(1, 2), 2)]


@pytest.mark.exact
def test_merge_roots_mixes_exact_and_isolated():
    polys = [UniPoly.linear(-1, 2), UniPoly((-1, 0, 2)), UniPoly.linear(-1, 1) * UniPoly.linear(-1, 2), UniPoly((-2, 0, 1))]
    roots = merge_roots(polys, 0, 1)
    assert [r.is_exact for r in roots] == [True, False, True]
    assert roots[0].value == Fraction(1, 2)
    assert roots[2].value == 1
    assert roots[1].lo < Fraction(7072, 10000) and roots[1].hi > Fraction(7071, 10000)
    assert roots[1].contains_root_of(UniPoly((-1, 0, 2)))
    assert not roots[1].contains_root_of(UniPoly.linear(-1, 2))


@pytest.mark.exact
def test_merge_roots_of_constants_is_empty():
    assert merge_roots([UniPoly.constant(3), UniPoly()], 0, 1) == []
