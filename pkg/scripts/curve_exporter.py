import logging
from pathlib import Path
from typing import Dict

import pandas as pd

from avvi.analysis_service import AnalysisResult
from avvi.components import ComponentReport
from avvi.config import CSV_SAMPLES
from avvi.parametric_sweep import Mode, OpenInterval
from avvi.utils import atomic_write_text

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


def _component_of(report: ComponentReport) -> Dict[int, int]:
    return {piece_id: k for k, group in enumerate(report.components) for piece_id in group}


def curve_frame(result: AnalysisResult, mode: Mode = Mode.WEAK, samples: int = CSV_SAMPLES) -> pd.DataFrame:
    """Float samples of every curve piece, for plotting only."""

    mode = Mode(mode)
    if mode not in result.graphs:
        raise ValueError(f"no {mode.value} piece graph in this analysis")
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")

    graph = result.graphs[mode]
    component = _component_of(result.components[mode])
    n = graph.problem.n
    records = []
    for piece in graph.pieces:
        if not isinstance(piece.cell, OpenInterval):
            continue
        curve = piece.geometry.curve
        for t in piece.cell.samples(samples):
            x = curve.at(t)
            record = {"xi1": float(t)}
            record.update({f"x_{j + 1}": float(v) for j, v in enumerate(x)})
            record.update({"cell_id": piece.cell.index, "pattern": str(piece.pattern), "component_id": component[piece.id]})
            records.append(record)

    columns = ["xi1"] + [f"x_{j + 1}" for j in range(n)] + ["cell_id", "pattern", "component_id"]
    return pd.DataFrame.from_records(records, columns=columns)


def export_curves(result: AnalysisResult, path, mode: Mode = Mode.WEAK, samples: int = CSV_SAMPLES) -> Path:

    frame = curve_frame(result, mode, samples)
    written = atomic_write_text(path, frame.to_csv(index=False))
    logger.info(f"Exported {len(frame)} curve samples to {written}")
    return written
