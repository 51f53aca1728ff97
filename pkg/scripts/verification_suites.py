import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from avvi.avi_solver import is_pareto, is_vi_solution, is_weak_pareto, solution_at
from avvi.components import build_piece_graph, compare_modes, count_components
from avvi.exact_linalg import Matrix, Vector, determinant, pfaffian, squared_distance_to_hyperplane
from avvi.instances import (
    BoundKind,
    bounds,
    embed_point,
    gen_family,
    ground_truth,
    lift_criterion,
    lift_variable,
    merge_weight,
    skew_root_bound,
    split_weight,
)
from avvi.model import AffineOperator, AvviProblem, Weight, is_nondegenerate, scalarize
from avvi.parametric_sweep import BicriteriaSweep, Mode
from avvi.sampling_oracle import sampling_oracle

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)

SUITES = ["pp", "cayley", "upper", "scalarization", "convexity", "separation", "lift", "oracle"]


def random_skew(rng: np.random.Generator, n: int, low: int = -5, high: int = 5) -> Matrix:
    upper = rng.integers(low, high + 1, size=(n, n))
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = int(upper[i, j])
            rows[j][i] = -int(upper[i, j])
    return Matrix.from_rows(rows)


def random_fraction(rng: np.random.Generator, denominator: int = 97) -> Fraction:
    """Rational in the open unit interval."""
    return Fraction(int(rng.integers(1, denominator)), denominator)


def structural_counts(problem: AvviProblem, exact: bool = True) -> Tuple[int, int, BicriteriaSweep]:
    sweep = BicriteriaSweep(problem, exact=exact)
    weak = count_components(build_piece_graph(problem, Mode.WEAK, sweep=sweep)).count
    pareto = count_components(build_piece_graph(problem, Mode.PARETO, sweep=sweep)).count
    return weak, pareto, sweep


class VerificationRunner:
    """Batch re-derivation of the family counts, bounds and structural properties."""

    def __init__(self, n_max: int = 8, seed: int = 0, progress: bool = True):
        if n_max < 2:
            raise ValueError(f"n_max must be at least 2, got {n_max}")
        self.n_max = n_max
        self.seed = seed
        self.progress = progress

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def _family_params(self, n_cap: int = None) -> List[Tuple[int, int]]:
        top = min(self.n_max, n_cap) if n_cap else self.n_max
        return [(n, p) for n in range(2, top + 1, 2) for p in range(0, n // 2 + 1)]

    def _bar(self, items, desc: str):
        return tqdm(items, desc=desc, disable=not self.progress)

    def suite_pp(self) -> pd.DataFrame:

        rows = []
        for n, p in self._bar(self._family_params(), "pp"):
            problem = gen_family(n, p)
            truth = ground_truth(n, p)
            sweep = BicriteriaSweep(problem)
            weak_graph = build_piece_graph(problem, Mode.WEAK, sweep=sweep)
            pareto_graph = build_piece_graph(problem, Mode.PARETO, sweep=sweep)
            weak = count_components(weak_graph).count
            pareto = count_components(pareto_graph).count
            criticals = [c.value for c in sweep.critical_values()]
            difference = compare_modes(weak_graph, pareto_graph)
            modes_ok = (
                difference.consistent
                and difference.removed_not_pareto
                and set(difference.removed_points) == set(truth.endpoints)
            )
            lower = bounds(2, n, p, BoundKind.LOWER_MONOTONE).value
            general = bounds(2, n, p, BoundKind.GENERAL_UPPER).value
            skew = bounds(2, n, p, BoundKind.SKEW_BICRITERIA_UPPER)
            upper = skew.value if skew.applicable else general
            rows.append(
                {
                    "instance": f"pp(n={n},p={p})",
                    "expected": truth.expected_chi,
                    "chi_weak": weak,
                    "chi_pareto": pareto,
                    "criticals_ok": criticals == list(truth.criticals),
                    "modes_ok": modes_ok,
                    "bounds_ok": lower <= weak <= upper <= general,
                }
            )
        frame = pd.DataFrame(rows)
        frame["passed"] = (
            (frame["expected"] == frame["chi_weak"])
            & (frame["expected"] == frame["chi_pareto"])
            & frame["criticals_ok"]
            & frame["modes_ok"]
            & frame["bounds_ok"]
        )
        return frame

    def suite_cayley(self, trials: int = 200) -> pd.DataFrame:

        rng = self._rng()
        sizes = [n for n in (2, 4, 6, 8) if n <= self.n_max]
        held: Dict[int, List[bool]] = {n: [] for n in sizes}
        for k in self._bar(range(trials), "cayley"):
            n = sizes[k % len(sizes)]
            M = random_skew(rng, n)
            held[n].append(pfaffian(M) ** 2 == determinant(M))
        frame = pd.DataFrame([{"n": n, "matrices": len(v), "identities": sum(v)} for n, v in held.items()])
        frame["passed"] = frame["matrices"] == frame["identities"]
        return frame

    def suite_upper(self, instances: int = 50) -> pd.DataFrame:

        rng = self._rng()
        sizes = [n for n in (2, 4, 6, 8) if n <= self.n_max]
        rows = []
        for k in self._bar(range(instances), "upper"):
            n = sizes[k % len(sizes)]
            q = [Vector(tuple(int(v) for v in rng.integers(-5, 6, size=n))) for _ in range(2)]
            while True:
                problem = AvviProblem((AffineOperator(random_skew(rng, n), q[0]), AffineOperator(random_skew(rng, n), q[1])))
                if is_nondegenerate(problem):
                    break
            weak, pareto, sweep = structural_counts(problem, exact=False)
            root_bound = skew_root_bound(problem)
            general = bounds(2, n, 0, BoundKind.GENERAL_UPPER).value
            chi = max(weak, pareto)
            rows.append(
                {
                    "instance": f"random-skew#{k}(n={n})",
                    "chi_weak": weak,
                    "chi_pareto": pareto,
                    "skew_upper": n + 1,
                    "root_bound": root_bound.bound,
                    "certified": all(c.is_exact for c in sweep.critical_values()),
                    "passed": chi <= n + 1 and chi <= root_bound.bound and chi <= general,
                }
            )
        return pd.DataFrame(rows)

    def _acceptance_problems(self) -> List[Tuple[str, AvviProblem]]:
        return [(f"pp(n={n},p={p})", gen_family(n, p)) for n, p in self._family_params(6)]

    def suite_scalarization(self, weights: int = 20) -> pd.DataFrame:

        rng = self._rng()
        rows = []
        for name, problem in self._bar(self._acceptance_problems(), "scalarization"):
            ts = [Fraction(0), Fraction(1)] + [random_fraction(rng) for _ in range(weights - 2)]
            checked = failed = 0
            for t in ts:
                for piece in solution_at(problem, Weight.bicriteria(t)).pieces:
                    x = piece.witness()
                    ok = is_pareto(problem, x) if 0 < t < 1 else is_weak_pareto(problem, x)
                    checked += 1
                    failed += not ok
            rows.append({"instance": name, "witnesses": checked, "failures": failed, "passed": failed == 0})
        return pd.DataFrame(rows)

    def _solution_points(self, problem: AvviProblem, t: Fraction, rng: np.random.Generator) -> List[Vector]:

        points = []
        for piece in solution_at(problem, Weight.bicriteria(t)).pieces:
            points.append(piece.witness())
            hull = piece.hull()
            for _ in range(3):
                coords = [Fraction(int(rng.integers(-20, 21)), 7) for _ in range(hull.dimension)]
                x = hull.point(coords)
                if piece.contains(x):
                    points.append(x)
        return points

    def suite_convexity(self, pairs: int = 100) -> pd.DataFrame:

        rng = self._rng()
        problems = [(name, problem) for name, problem in self._acceptance_problems() if problem.p > 0]
        held = failed = 0
        for k in self._bar(range(pairs), "convexity"):
            name, problem = problems[k % len(problems)]
            truth = ground_truth(problem.n, problem.p)
            # the critical parameters carry the non-singleton solution lines
            candidates = list(truth.criticals[: problem.p]) + [random_fraction(rng)]
            t = candidates[int(rng.integers(0, len(candidates)))]
            points = self._solution_points(problem, t, rng)
            if not points:
                continue
            x = points[int(rng.integers(0, len(points)))]
            y = points[int(rng.integers(0, len(points)))]
            midpoint = (x + y) * Fraction(1, 2)
            ok = is_vi_solution(scalarize(problem, Weight.bicriteria(t)), problem.constraint, midpoint)
            held += ok
            failed += not ok
        return pd.DataFrame([{"pairs": held + failed, "midpoints_solving": held, "passed": failed == 0}])

    def suite_separation(self, samples: int = 20) -> pd.DataFrame:

        rng = self._rng()
        rows = []
        for n, p in self._bar([(n, p) for n, p in self._family_params() if p >= 1], "separation"):
            problem = gen_family(n, p)
            curves = [piece for piece in BicriteriaSweep(problem).pieces(Mode.WEAK) if piece.is_curve]
            distances = set()
            for _ in range(samples):
                piece = curves[int(rng.integers(0, len(curves)))]
                lo, hi = piece.cell.rational_bounds()
                t = lo + (hi - lo) * random_fraction(rng)
                x = piece.geometry.curve.at(t)
                for i in range(p):
                    row, rhs = problem.constraint.row(i)
                    distances.add(squared_distance_to_hyperplane(x, row, rhs))
            rows.append({"instance": f"pp(n={n},p={p})", "distances": sorted(distances), "passed": distances == {Fraction(1, 2)}})
        return pd.DataFrame(rows)

    def suite_lift(self) -> pd.DataFrame:

        rows = []
        for n, p in self._bar([(2, 0), (4, 1)], "lift"):
            if n > self.n_max:
                continue
            problem = gen_family(n, p)
            expected = ground_truth(n, p).expected_chi
            weak, pareto, _ = structural_counts(problem)

            lifted = lift_variable(problem)
            lifted_weak, lifted_pareto, _ = structural_counts(lifted)
            w = Weight.bicriteria(Fraction(1, 3))
            original = solution_at(problem, w).singleton
            embedded_ok = solution_at(lifted, w).singleton == embed_point(original)

            duplicated = lift_criterion(problem)
            # a grid of resolution 60 holds the weights whose first entry is 1/2 or 2/3
            oracle = sampling_oracle(duplicated, grid=math.comb(62, 2)).count
            eta = split_weight(w)
            weight_ok = merge_weight(eta) == w and all(
                is_vi_solution(scalarize(problem, w), problem.constraint, piece.witness())
                for piece in solution_at(duplicated, eta).pieces
            )
            rows.append(
                {
                    "instance": f"pp(n={n},p={p})",
                    "expected": expected,
                    "original": weak,
                    "variable_lift": lifted_weak,
                    "criterion_lift_oracle": oracle,
                    "passed": len({expected, weak, pareto, lifted_weak, lifted_pareto, oracle}) == 1 and embedded_ok and weight_ok,
                }
            )
        return pd.DataFrame(rows)

    def suite_oracle(self) -> pd.DataFrame:

        rows = []
        for n, p in self._bar(self._family_params(), "oracle"):
            problem = gen_family(n, p)
            weak, _, _ = structural_counts(problem)
            report = sampling_oracle(problem)
            rows.append({"instance": f"pp(n={n},p={p})", "structural": weak, "oracle": report.count, "clipped": report.clipped})
        frame = pd.DataFrame(rows)
        frame["passed"] = frame["structural"] == frame["oracle"]
        return frame

    def suites(self) -> Dict[str, Callable[[], pd.DataFrame]]:
        return {name: getattr(self, f"suite_{name}") for name in SUITES}

    def run(self, suite: str) -> Tuple[Dict[str, pd.DataFrame], bool]:

        selected = SUITES if suite == "all" else [suite]
        unknown = [name for name in selected if name not in SUITES]
        if unknown:
            raise ValueError(f"unknown suite {unknown[0]!r}; choose from {SUITES + ['all']}")

        tables = {}
        for name in selected:
            logger.info(f"Running verification suite '{name}' (n_max={self.n_max}, seed={self.seed})")
            tables[name] = self.suites()[name]()
        passed = all(bool(table["passed"].all()) for table in tables.values())
        logger.info(f"Verification {'passed' if passed else 'FAILED'}")
        return tables, passed
