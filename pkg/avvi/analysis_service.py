import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from avvi.avi_solver import TooManyConstraintsError
from avvi.components import ComponentReport, PieceGraph, build_piece_graph, compare_modes, count_components
from avvi.config import ORACLE_CLIP, ORACLE_EPS, ORACLE_GRID
from avvi.instances import BoundKind, all_bounds
from avvi.model import AvviProblem, UnsupportedProblemError, is_monotone, is_nondegenerate, is_skew
from avvi.parametric_sweep import BicriteriaSweep, IrrationalCriticalValueError, Mode, SweepInvariantError
from avvi.polynomials import ExactRational
from avvi.sampling_oracle import OracleReport, sampling_oracle
from avvi.utils import format_rational

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


def modes_of(mode: str) -> List[Mode]:
    if mode == "both":
        return [Mode.WEAK, Mode.PARETO]
    return [Mode(mode)]


@dataclass
class AnalysisResult:
    report: dict
    graphs: Dict[Mode, PieceGraph] = field(default_factory=dict)
    components: Dict[Mode, ComponentReport] = field(default_factory=dict)
    oracle: Optional[OracleReport] = None

    def chi(self, mode: Mode) -> Optional[int]:
        found = self.components.get(Mode(mode))
        return found.count if found else None


class AvviAnalysisService:
    """Model checks, parametric sweep, structural counts and the optional oracle."""

    def __init__(
        self,
        modes: Sequence[Mode] = (Mode.WEAK, Mode.PARETO),
        exact: bool = True,
        oracle: bool = False,
        grid: int = ORACLE_GRID,
        eps: float = ORACLE_EPS,
        clip: float = ORACLE_CLIP,
        timing: bool = True,
    ):
        self.modes = [Mode(m) for m in modes]
        self.exact = exact
        self.oracle = oracle
        self.grid = grid
        self.eps = eps
        self.clip = clip
        self.timing = timing

        logger.info(f"AvviAnalysisService initialized (modes={[m.value for m in self.modes]}, exact={exact}, oracle={oracle})")

    def summarize(self, problem: AvviProblem) -> dict:

        summary = {
            "n": problem.n,
            "m": problem.m,
            "p": problem.p,
            "monotone": is_monotone(problem),
            "skew": all(is_skew(op.M) for op in problem.operators),
            "nondegenerate": is_nondegenerate(problem) if problem.m == 2 else None,
            "unconstrained": problem.is_unconstrained,
        }
        if problem.meta:
            summary["meta"] = problem.meta
        return summary

    def _bound_flags(self, problem: AvviProblem, summary: dict, chi: Optional[int]) -> dict:

        found = {b.kind: b for b in all_bounds(problem.m, problem.n, problem.p)}
        skew = found[BoundKind.SKEW_BICRITERIA_UPPER]
        skew_hypotheses = summary["skew"] and summary["unconstrained"] and bool(summary["nondegenerate"])
        flags = {
            "within_general_upper": None,
            "within_skew_upper": None,
            "meets_lower_bound": None,
            "exceeds_criteria_count": None,
        }
        if chi is not None:
            flags["within_general_upper"] = chi <= found[BoundKind.GENERAL_UPPER].value
            if skew.applicable and skew_hypotheses:
                flags["within_skew_upper"] = chi <= skew.value
            lower = found[BoundKind.LOWER_MONOTONE]
            if lower.applicable:
                flags["meets_lower_bound"] = chi >= lower.value
            flags["exceeds_criteria_count"] = chi > problem.m
        return {"bounds": [b.to_dict() for b in found.values()], "flags": flags}

    def _structural(self, problem: AvviProblem, report: dict, result: AnalysisResult, timings: dict):

        started = time.perf_counter()
        sweep = BicriteriaSweep(problem, exact=self.exact)
        criticals = sweep.critical_values()
        report["critical_values"] = [
            format_rational(c.value) if isinstance(c, ExactRational) else c.to_dict() for c in criticals
        ]
        timings["sweep"] = time.perf_counter() - started

        started = time.perf_counter()
        for mode in self.modes:
            graph = build_piece_graph(problem, mode, exact=self.exact, sweep=sweep)
            components = count_components(graph)
            result.graphs[mode] = graph
            result.components[mode] = components
            report[mode.value] = {
                "cells": [cell.to_dict() for cell in sweep.cells(mode)],
                **graph.to_dict(),
                "components": components.components,
                "witnesses": [w.to_list() for w in components.witnesses],
                "count": components.count,
            }
            report[f"chi_{mode.value}"] = components.count
        timings["components"] = time.perf_counter() - started

        if Mode.WEAK in result.graphs and Mode.PARETO in result.graphs:
            report["mode_comparison"] = compare_modes(result.graphs[Mode.WEAK], result.graphs[Mode.PARETO]).to_dict()
        report["structural"] = "exact" if all(g.certified for g in result.graphs.values()) else "degraded"

    def run(self, problem: AvviProblem) -> AnalysisResult:

        total = time.perf_counter()
        timings: Dict[str, float] = {}
        summary = self.summarize(problem)
        report = {"problem": summary}
        result = AnalysisResult(report)

        fallback = False
        if problem.m != 2:
            report["structural"] = "unsupported"
            report["reason"] = f"structural counting needs m=2, got m={problem.m}"
            fallback = True
        else:
            try:
                self._structural(problem, report, result, timings)
            except (UnsupportedProblemError, IrrationalCriticalValueError, TooManyConstraintsError) as e:
                logger.warning(f"Structural analysis unavailable, using the sampling oracle: {e}")
                report["structural"] = "unsupported"
                report["reason"] = str(e)
                fallback = True
            except SweepInvariantError as e:
                logger.error(f"Sweep invariant violated: {e}")
                raise

        if self.oracle or fallback:
            started = time.perf_counter()
            mode = self.modes[0]
            result.oracle = sampling_oracle(problem, grid=self.grid, eps=self.eps, clip=self.clip, mode=mode)
            report["oracle"] = result.oracle.to_dict()
            timings["oracle"] = time.perf_counter() - started

        chi = next((result.chi(m) for m in self.modes if result.chi(m) is not None), None)
        report.update(self._bound_flags(problem, summary, chi))

        if self.timing:
            timings["total"] = time.perf_counter() - total
            report["timing"] = {k: round(v, 4) for k, v in timings.items()}
        logger.info(f"Analysis finished: structural={report['structural']}, chi={chi}")
        return result
