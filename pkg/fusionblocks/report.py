"""Tabular output shared by the command line: polars frames rendered as text or JSON records."""
from __future__ import annotations

import json
import time
from contextlib import contextmanager
from typing import (
    Any,
    Iterator,
    Optional,
    Sequence,
)

import polars as pl
from loguru import logger

from fusionblocks.formats import Report
from fusionblocks.series.laurent import ZLaurent
from fusionblocks.series.qseries import QSeries


def frame(rows: Sequence[dict[str, Any]], columns: Optional[Sequence[str]] = None) -> pl.DataFrame:
    """Rows as a frame; values that are not plain scalars are stringified."""
    cleaned = [{key: _plain(value) for key, value in row.items()} for row in rows]
    if not cleaned:
        return pl.DataFrame({name: [] for name in columns or ()})
    result = pl.DataFrame(cleaned)
    return result.select(list(columns)) if columns else result


def _plain(value: Any) -> Any:
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def series_frame(series: QSeries) -> pl.DataFrame:
    """One row per nonzero ``q^e u^j`` term."""
    return frame(series.rows(), ['q', 'u', 'value'])


def laurent_frame(series: ZLaurent) -> pl.DataFrame:
    return frame(series.rows(), ['z', 'q', 'u', 'value'])


def render_text(table: pl.DataFrame) -> str:
    if table.is_empty():
        return '(empty)'
    with pl.Config(tbl_rows=-1, tbl_cols=-1, fmt_str_lengths=120, tbl_hide_dataframe_shape=True):
        return str(table)


def records(table: pl.DataFrame) -> list[dict[str, Any]]:
    return table.to_dicts()


@contextmanager
def timed() -> Iterator[dict[str, float]]:
    """Yield a dict whose ``runtime_ms`` is filled in on exit."""
    clock = {'runtime_ms': 0.0}
    start = time.perf_counter()
    try:
        yield clock
    finally:
        clock['runtime_ms'] = round((time.perf_counter() - start) * 1000.0, 3)


def envelope(
    command: str,
    inputs: dict[str, Any],
    result: Any,
    residuals: Sequence[dict[str, Any]] = (),
    runtime_ms: float = 0.0,
) -> Report:
    return Report(command=command, inputs=inputs, result=result, residuals=list(residuals), runtime_ms=runtime_ms)


def emit(report: Report, as_json: bool, text: str) -> str:
    """The string written to stdout for ``report``."""
    logger.debug('{} finished in {} ms', report.command, report.runtime_ms)
    if as_json:
        return json.dumps(report.model_dump(mode='json', by_alias=True), indent=2)
    return text
