"""
Accuracy grids across reports: one row per model, one column per (dataset, schedule).

Cells hold fractions in [0, 1]. Repeated reports for the same cell (a seed sweep) collapse to
their mean, with the half-range in the matching "±" column. Published values, when the report
names its published dataset, sit in "published" and "delta" columns next to the measured ones.
"""
import logging
from collections import OrderedDict
from os import makedirs
from os.path import dirname, expanduser
from typing import Dict, List, Sequence

import colored_logging as cl
import numpy as np
import pandas as pd

from .constants import MODEL_DISPLAY_NAMES, PUBLISHED_ACCURACY
from .exceptions import DigestConflict
from .experiment_report import ExperimentReport
from .model_spec import MODEL_KINDS

logger = logging.getLogger(__name__)

# sections that must agree for reports to share a dataset column
SHARED_SECTIONS = ("dataset", "preprocess", "features", "split")


def dataset_label(report: ExperimentReport) -> str:
    return report.published_dataset or report.dataset


def check_compatible(reports: Sequence[ExperimentReport]) -> None:
    """
    Raises:
        DigestConflict: if two reports of one dataset disagree on a shared section; carries the
            differing section names.
    """
    reference: Dict[str, ExperimentReport] = {}

    for report in reports:
        label = dataset_label(report)

        if label not in reference:
            reference[label] = report
            continue

        first = reference[label]
        differing = [
            section for section in SHARED_SECTIONS
            if first.section_digests.get(section) != report.section_digests.get(section)
        ]

        if differing:
            diff = "; ".join(
                f"{section}: {first.section_digests.get(section, '-')[:12]} != {report.section_digests.get(section, '-')[:12]}"
                for section in differing
            )
            raise DigestConflict(
                f"reports {first.name} (seed {first.seed}) and {report.name} (seed {report.seed}) "
                f"of dataset {label} differ in {diff}",
                sections=differing,
            )


def published_accuracy(schedule: str, published_dataset: str, kind: str) -> float:
    return PUBLISHED_ACCURACY.get(schedule, {}).get(published_dataset, {}).get(kind, np.nan)


def emit_table(reports: Sequence[ExperimentReport], include_published: bool = True) -> pd.DataFrame:
    """
    Merge reports into a model x (dataset, schedule) accuracy grid.

    Args:
        reports (Sequence[ExperimentReport]): at least one report.
        include_published (bool): add published values and their deltas where the report names its
            published dataset (DS1 or DS2).

    Returns:
        pd.DataFrame: indexed by model display name in zoo order, with a "<dataset>/<schedule>"
        column per cell group plus its "±" column and, optionally, "published" and "delta" columns.

    Raises:
        ValueError: for an empty report list.
        DigestConflict: for reports of one dataset produced under different shared sections.
    """
    if len(reports) == 0:
        raise ValueError("no reports to tabulate")

    check_compatible(reports)
    cells: Dict[str, Dict[str, List[float]]] = OrderedDict()
    published: Dict[str, str] = {}

    for report in reports:
        column = f"{dataset_label(report)}/{report.schedule}"
        cells.setdefault(column, OrderedDict())
        published[column] = report.published_dataset

        for result in report.succeeded:
            if result.test_accuracy is None:
                continue

            cells[column].setdefault(result.kind, []).append(result.test_accuracy)

    kinds = [kind for kind in MODEL_KINDS if any(kind in values for values in cells.values())]
    table = pd.DataFrame(index=pd.Index([MODEL_DISPLAY_NAMES[kind] for kind in kinds], name="model"))

    for column, values in cells.items():
        means = [np.mean(values[kind]) if kind in values else np.nan for kind in kinds]
        spreads = [(max(values[kind]) - min(values[kind])) / 2 if kind in values else np.nan for kind in kinds]
        table[column] = means
        table[f"{column} ±"] = spreads

        if include_published and published[column] is not None:
            schedule = column.rsplit("/", 1)[1]
            reference = [published_accuracy(schedule, published[column], kind) for kind in kinds]
            table[f"{column} published"] = reference
            table[f"{column} delta"] = np.array(means) - np.array(reference)

    logger.info(f"tabulated {cl.val(len(reports))} reports into {cl.val(len(cells))} columns of {cl.val(len(kinds))} models")

    return table


def format_table(table: pd.DataFrame) -> str:
    """Aligned plain text, three decimals, '-' for empty cells."""
    return table.to_string(float_format=lambda value: f"{value:.3f}", na_rep="-")


def write_table(table: pd.DataFrame, filename: str, text_filename: str = None) -> str:
    filename = expanduser(filename)

    if dirname(filename):
        makedirs(dirname(filename), exist_ok=True)

    table.to_csv(filename, float_format="%.6f")

    if text_filename is not None:
        with open(expanduser(text_filename), "w") as file:
            file.write(format_table(table) + "\n")

    logger.info(f"wrote results table to {cl.dir(filename)}")

    return filename
