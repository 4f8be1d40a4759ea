"""CSV and JSON artifact writers. Output is byte-identical for identical input."""

import json
import logging
from pathlib import Path

import pandas as pd

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.15g"


def write_density_csv(path, grid, columns):
    """
    Write density columns next to the grid positions.

    Args:
        path: Output CSV file
        grid: PointerGrid giving the q column
        columns: Mapping of column name -> array of length grid.n
    """
    frame = pd.DataFrame({"q": grid.positions, **columns})
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info("✓ Wrote %s (%d rows)", path, len(frame))
    return Path(path)


def write_rows_csv(path, rows):
    """Write a list of pydantic rows as a CSV table."""
    frame = pd.DataFrame([row.model_dump() for row in rows])
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info("✓ Wrote %s (%d rows)", path, len(frame))
    return Path(path)


def report_json(model):
    return json.dumps(model.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def write_report_json(path, model):
    Path(path).write_text(report_json(model), encoding="utf-8")
    logger.info("✓ Wrote %s", path)
    return Path(path)
