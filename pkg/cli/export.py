"""
Export utilities: CSV, JSON and Excel renderings of result tables.

Floats are written with the shortest representation that round-trips
(at most 17 significant digits), so every file re-parses bit-exactly.
"""
import csv
import io
import json
import math
from typing import Any, Iterable, List, Sequence, Tuple, Union

import numpy as np
from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter


def format_value(value: Any) -> str:
    """Text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def parse_value(text: str) -> Any:
    """Inverse of format_value: numbers become floats, everything else stays text."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


def table_to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def _json_value(value: Any) -> Any:
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def json_ready(value: Any) -> Any:
    """Plain JSON types; NaN and ±inf become null."""
    if isinstance(value, dict):
        return {key: json_ready(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    value = _json_value(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps_json(value: Any) -> str:
    return json.dumps(json_ready(value), indent=2, allow_nan=False) + "\n"


def table_to_json(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    return dumps_json([dict(zip(header, row)) for row in rows])


def table_to_xlsx(title: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> io.BytesIO:
    """
    Export a table to an Excel workbook.

    Args:
        title: sheet title
        header: column names
        rows: row values; non-finite floats are written as text

    Returns:
        BytesIO buffer containing the Excel file
    """
    wb = Workbook()
    ws = wb.active
    ws.title = title[:31]

    # Styles
    header_font = Font(bold=True, color="FFFFFF")
    header_fill = PatternFill(start_color="4472C4", end_color="4472C4", fill_type="solid")
    header_alignment = Alignment(horizontal="center", vertical="center", wrap_text=True)
    thin_border = Border(
        left=Side(style="thin"),
        right=Side(style="thin"),
        top=Side(style="thin"),
        bottom=Side(style="thin"),
    )

    for col, name in enumerate(header, 1):
        cell = ws.cell(row=1, column=col, value=name)
        cell.font = header_font
        cell.fill = header_fill
        cell.alignment = header_alignment
        cell.border = thin_border

    for row_num, row in enumerate(rows, 2):
        for col, value in enumerate(row, 1):
            value = _json_value(value)
            if isinstance(value, float) and not math.isfinite(value):
                value = repr(value)
            ws.cell(row=row_num, column=col, value=value)

    for col, name in enumerate(header, 1):
        ws.column_dimensions[get_column_letter(col)].width = max(12, len(name) + 4)

    # Freeze header row
    ws.freeze_panes = "A2"

    output = io.BytesIO()
    wb.save(output)
    output.seek(0)
    return output


def render_table(fmt: str, title: str, header: Sequence[str], rows: List[Sequence[Any]]) -> Union[str, bytes]:
    if fmt == "csv":
        return table_to_csv(header, rows)
    if fmt == "json":
        return table_to_json(header, rows)
    if fmt == "xlsx":
        return table_to_xlsx(title, header, rows).getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def read_csv_text(text: str) -> Tuple[List[str], List[List[Any]]]:
    """
    Parse CSV content written by table_to_csv.

    Returns:
        (header, rows) with numeric cells as floats
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [[parse_value(cell) for cell in row] for row in reader]


def read_csv(path: str) -> Tuple[List[str], List[List[Any]]]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return read_csv_text(handle.read())


def read_numeric_csv(path: str) -> Tuple[List[str], np.ndarray]:
    """CSV whose cells are all numbers, as a float array."""
    header, rows = read_csv(path)
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))
