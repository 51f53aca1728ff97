import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, List, Sequence, Tuple, Union

import sympy

from avvi.config import ROOT_WIDTH
from avvi.utils import format_rational, to_rational

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)

T = sympy.Symbol("t")


class ZeroPolynomialError(ValueError):
    pass


def _to_sympy_rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _from_sympy_rational(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial in t with exact rational coefficients, ascending degree."""

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        coeffs = [to_rational(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def constant(cls, value) -> "UniPoly":
        return cls((value,))

    @classmethod
    def linear(cls, c0, c1) -> "UniPoly":
        return cls((c0, c1))

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> "UniPoly":
        return cls(tuple(_from_sympy_rational(c) for c in reversed(poly.all_coeffs())))

    def to_sympy(self) -> sympy.Poly:
        descending = [_to_sympy_rational(c) for c in reversed(self.coeffs)] or [sympy.Integer(0)]
        return sympy.Poly(descending, T, domain=sympy.QQ)

    @property
    def degree(self) -> Union[int, float]:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, t) -> Fraction:
        t = to_rational(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def sign_at(self, t) -> int:
        value = self(t)
        return (value > 0) - (value < 0)

    def __add__(self, other) -> "UniPoly":
        other = _as_poly(other)
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (size - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (size - len(other.coeffs))
        return UniPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "UniPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "UniPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            factor = to_rational(other)
            return UniPoly(tuple(c * factor for c in self.coeffs))
        if self.is_zero or other.is_zero:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(tuple(out))

    __rmul__ = __mul__

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def divmod(self, other: "UniPoly") -> Tuple["UniPoly", "UniPoly"]:
        if other.is_zero:
            raise ZeroDivisionError("Polynomial division by zero")
        q, r = self.to_sympy().div(other.to_sympy())
        return UniPoly.from_sympy(q), UniPoly.from_sympy(r)

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise ValueError(f"{other} does not divide {self}")
        return q

    def gcd(self, other: "UniPoly") -> "UniPoly":
        return UniPoly.from_sympy(self.to_sympy().gcd(other.to_sympy()))

    def lcm(self, other: "UniPoly") -> "UniPoly":
        return UniPoly.from_sympy(self.to_sympy().lcm(other.to_sympy()))

    def monic(self) -> "UniPoly":
        if self.is_zero:
            return self
        return self * (1 / self.leading)

    def sqf_part(self) -> "UniPoly":
        if self.degree <= 0:
            return UniPoly.constant(1) if not self.is_zero else self
        return UniPoly.from_sympy(self.to_sympy().sqf_part())

    def sqf_list(self) -> List[Tuple["UniPoly", int]]:
        _, factors = self.to_sympy().sqf_list()
        return [(UniPoly.from_sympy(f), k) for f, k in factors]

    def integer_coefficients(self) -> List[int]:
        """Primitive integer multiple of the coefficients, ascending."""

        if self.is_zero:
            return []
        common = reduce(lcm, (c.denominator for c in self.coeffs), 1)
        ints = [int(c * common) for c in self.coeffs]
        content = reduce(gcd, (abs(c) for c in ints if c), 0) or 1
        return [c // content for c in ints]

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            coef = format_rational(c)
            if i == 0:
                terms.append(coef)
            elif i == 1:
                terms.append(f"{coef}*t")
            else:
                terms.append(f"{coef}*t^{i}")
        return " + ".join(terms)


def _as_poly(value) -> UniPoly:
    if isinstance(value, UniPoly):
        return value
    return UniPoly.constant(value)


def lagrange_interpolate(nodes: Sequence, values: Sequence) -> UniPoly:

    if len(nodes) != len(values):
        raise ValueError("nodes and values must have the same length")
    if len(set(nodes)) != len(nodes):
        raise ValueError("interpolation nodes must be distinct")
    if not nodes:
        return UniPoly()
    data = [(_to_sympy_rational(to_rational(x)), _to_sympy_rational(to_rational(y))) for x, y in zip(nodes, values)]
    expr = sympy.interpolate(data, T)
    return UniPoly.from_sympy(sympy.Poly(sympy.expand(expr), T, domain=sympy.QQ))


@dataclass(frozen=True)
class ExactRational:
    value: Fraction
    multiplicity: int = 1

    is_exact = True

    @property
    def lower(self) -> Fraction:
        return self.value

    @property
    def upper(self) -> Fraction:
        return self.value

    @property
    def approx(self) -> float:
        return float(self.value)

    def to_dict(self):
        return {"kind": "exact", "value": self.value, "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class IsolatingInterval:
    """Closed interval [lo, hi] holding exactly one irrational root of `defining`."""

    lo: Fraction
    hi: Fraction
    multiplicity: int
    defining: UniPoly

    is_exact = False

    @property
    def lower(self) -> Fraction:
        return self.lo

    @property
    def upper(self) -> Fraction:
        return self.hi

    @property
    def approx(self) -> float:
        return float((self.lo + self.hi) / 2)

    def contains_root_of(self, poly: UniPoly) -> bool:
        if poly.is_zero:
            return True
        common = poly.gcd(self.defining)
        if common.degree < 1:
            return False
        return count_roots(common, self.lo, self.hi) > 0

    def to_dict(self):
        return {"kind": "interval", "lo": self.lo, "hi": self.hi, "multiplicity": self.multiplicity}


Root = Union[ExactRational, IsolatingInterval]


def multiplicity_at(p: UniPoly, r: Fraction) -> int:

    k = 0
    current = p
    while not current.is_zero and current(r) == 0:
        k += 1
        current = current.derivative()
    return k


def rational_roots(p: UniPoly) -> List[Fraction]:
    """All distinct rational roots, by the rational-root test on the square-free part."""

    if p.is_zero:
        raise ZeroPolynomialError("the zero polynomial has every rational as a root")
    q = p.sqf_part()
    ints = q.integer_coefficients()
    roots = []
    if len(ints) > 1 and ints[0] == 0:
        roots.append(Fraction(0))
        while ints and ints[0] == 0:
            ints = ints[1:]
    if len(ints) <= 1:
        return sorted(roots)

    a0, an = abs(ints[0]), abs(ints[-1])
    candidates = set()
    for num in sympy.divisors(a0):
        for den in sympy.divisors(an):
            candidates.add(Fraction(int(num), int(den)))
            candidates.add(Fraction(-int(num), int(den)))
    roots.extend(r for r in candidates if q(r) == 0)
    return sorted(set(roots))


def sturm_chain(p: UniPoly) -> List[UniPoly]:
    return [UniPoly.from_sympy(f) for f in sympy.sturm(p.to_sympy())]


def sign_variations(chain: Iterable[UniPoly], t: Fraction) -> int:

    signs = [s for s in (f.sign_at(t) for f in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: UniPoly, lo, hi) -> int:
    """Distinct real roots of p in the closed interval [lo, hi]."""

    if p.is_zero:
        raise ZeroPolynomialError("cannot count roots of the zero polynomial")
    lo, hi = to_rational(lo), to_rational(hi)
    if p.degree < 1:
        return 0
    return int(p.to_sympy().count_roots(_to_sympy_rational(lo), _to_sympy_rational(hi)))


def count_roots_open(p: UniPoly, lo, hi) -> int:
    lo, hi = to_rational(lo), to_rational(hi)
    if lo >= hi:
        return 0
    inside = count_roots(p, lo, hi)
    return inside - (p(lo) == 0) - (p(hi) == 0)


def _halve(a: Fraction, b: Fraction, chain: List[UniPoly]) -> Tuple[Fraction, Fraction]:
    mid = (a + b) / 2
    if sign_variations(chain, mid) - sign_variations(chain, b) == 1:
        return mid, b
    return a, mid


def _separate(intervals: List[Tuple[Fraction, Fraction]], chain: List[UniPoly]) -> List[Tuple[Fraction, Fraction]]:
    """Narrow neighbouring intervals until no two of them share an endpoint."""

    intervals = sorted(intervals)
    for k in range(len(intervals) - 1):
        (a, b), (c, d) = intervals[k], intervals[k + 1]
        while b >= c:
            a, b = _halve(a, b, chain)
            c, d = _halve(c, d, chain)
        intervals[k], intervals[k + 1] = (a, b), (c, d)
    return intervals


def _shrink_away_from(a: Fraction, b: Fraction, chain: List[UniPoly], blocked: List[Fraction]):
    while a in blocked or b in blocked or any(a < r < b for r in blocked):
        a, b = _halve(a, b, chain)
    return a, b


def isolate_roots(p: UniPoly, lo, hi, width=None) -> List[Root]:

    if p.is_zero:
        raise ZeroPolynomialError("cannot isolate roots of the zero polynomial")
    lo, hi = to_rational(lo), to_rational(hi)
    if lo > hi:
        raise ValueError(f"empty search interval [{lo}, {hi}]")
    width = to_rational(width) if width is not None else ROOT_WIDTH
    if p.degree < 1:
        return []

    all_rational = rational_roots(p)
    roots: List[Root] = [ExactRational(r, multiplicity_at(p, r)) for r in all_rational if lo <= r <= hi]

    rest = p.sqf_part()
    for r in all_rational:
        rest = rest.exact_div(UniPoly.linear(-r, 1))

    if rest.degree >= 1 and lo < hi:
        chain = sturm_chain(rest)
        factors = p.sqf_list()
        stack = [(lo, hi)]
        found = []
        while stack:
            a, b = stack.pop()
            k = sign_variations(chain, a) - sign_variations(chain, b)
            if k == 0:
                continue
            if k == 1 and b - a <= width:
                found.append((a, b))
                continue
            mid = (a + b) / 2
            stack.append((a, mid))
            stack.append((mid, b))

        found = [_shrink_away_from(a, b, chain, all_rational) for a, b in _separate(found, chain)]
        for a, b in found:
            multiplicity = next((k for f, k in factors if f.degree >= 1 and count_roots(f, a, b) > 0), 1)
            roots.append(IsolatingInterval(a, b, multiplicity, rest))
        if found:
            logger.info(f"Isolated {len(found)} irrational root(s) of {p} in [{lo}, {hi}]")

    return sorted(roots, key=lambda root: root.lower)


def merge_roots(polys: Iterable[UniPoly], lo, hi, width=None) -> List[Root]:
    """Sorted distinct roots in [lo, hi] of a family of polynomials.

    Rational roots are found per polynomial; the irrational remainders are
    merged through their lcm so that isolating intervals never overlap.
    """

    lo, hi = to_rational(lo), to_rational(hi)
    rationals = set()
    remainder = UniPoly.constant(1)
    for p in polys:
        if p.is_zero or p.degree < 1:
            continue
        found = rational_roots(p)
        rest = p.sqf_part()
        for r in found:
            rest = rest.exact_div(UniPoly.linear(-r, 1))
        rationals.update(r for r in found if lo <= r <= hi)
        if rest.degree >= 1:
            remainder = remainder.lcm(rest)

    roots: List[Root] = [ExactRational(r, 1) for r in sorted(rationals)]
    if remainder.degree >= 1:
        blocked = sorted(rationals)
        product = remainder
        for r in blocked:
            product = product * UniPoly.linear(-r, 1)
        roots = [root for root in isolate_roots(product, lo, hi, width) if not root.is_exact] + roots
        roots = [IsolatingInterval(root.lo, root.hi, 1, remainder) if not root.is_exact else root for root in roots]
    return sorted(roots, key=lambda root: root.lower)
