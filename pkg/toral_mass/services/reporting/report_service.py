"""
Report service for writing results as JSON or CSV

JSON bodies keep the insertion order of the result dictionaries and write
reals with the shortest repr that reads back exactly. CSV bodies write reals
with 17 significant digits and quote fields as RFC 4180 requires.
"""
import csv
import hashlib
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from ..spectral.base_service import BaseService
from ...exceptions import ToralValidationError
from ...models import ReportFormat, to_jsonable
from ... import signals

logger = logging.getLogger(__name__)


@dataclass
class ReportTable:
    """Rows of equal length under fixed column names"""
    columns: List[str]
    rows: List[Sequence[Any]] = field(default_factory=list)

    def __post_init__(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ToralValidationError(f"table row {i} has {len(row)} fields, expected {width}")


def format_cell(value: Any) -> str:
    """CSV text of one value"""
    value = to_jsonable(value)
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return format(value, '.17g')
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return str(value)


def flatten(results: Any, prefix: str = '') -> List[List[str]]:
    """(field, value) rows with dotted field names"""
    results = to_jsonable(results)
    if isinstance(results, dict):
        rows: List[List[str]] = []
        for key, value in results.items():
            rows.extend(flatten(value, f"{prefix}.{key}" if prefix else str(key)))
        return rows
    return [[prefix or 'value', format_cell(results)]]


def checksum(body: bytes) -> str:
    return 'sha256:' + hashlib.sha256(body).hexdigest()


class ReportService(BaseService):
    """Renders and writes result reports"""

    def render(self, results: Any, fmt: Union[ReportFormat, str] = ReportFormat.JSON) -> bytes:
        """
        Serialize results to bytes

        Args:
            results: A model, a dictionary, or a ReportTable
            fmt: json or csv

        Returns:
            Encoded body; CSV of a non-table result has columns field, value
        """
        fmt = ReportFormat(fmt)
        if fmt is ReportFormat.JSON:
            if isinstance(results, ReportTable):
                payload: Any = {'columns': results.columns, 'rows': results.rows}
            else:
                payload = results
            return (json.dumps(to_jsonable(payload), indent=2, allow_nan=False) + '\n').encode('utf-8')

        buffer = io.StringIO(newline='')
        writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator='\r\n')
        if isinstance(results, ReportTable):
            writer.writerow(results.columns)
            for row in results.rows:
                writer.writerow([format_cell(value) for value in row])
        else:
            writer.writerow(['field', 'value'])
            writer.writerows(flatten(results))
        return buffer.getvalue().encode('utf-8')

    def emit_report(self, results: Any, fmt: Union[ReportFormat, str], path: str) -> str:
        """
        Write a report file

        Args:
            results: A model, a dictionary, or a ReportTable
            fmt: json or csv
            path: Destination file

        Returns:
            Checksum of the written body

        Raises:
            ToralValidationError: The path cannot be written
        """
        fmt = ReportFormat(fmt)
        body = self.render(results, fmt)
        try:
            with open(path, 'wb') as handle:
                handle.write(body)
        except OSError as e:
            raise ToralValidationError(f"cannot write report to {path}: {e.strerror or str(e)}")
        digest = checksum(body)
        logger.debug("wrote %s report %s (%d bytes)", fmt.value, path, len(body))
        signals.report_written.send(self, path=path, format=fmt.value, checksum=digest)
        return digest

    def format_for_path(self, path: str, default: ReportFormat = ReportFormat.JSON) -> ReportFormat:
        """csv for *.csv paths, the default otherwise"""
        return ReportFormat.CSV if str(path).lower().endswith('.csv') else default


def table_from_records(records: Iterable[Dict[str, Any]], columns: Optional[List[str]] = None) -> ReportTable:
    """Build a table from dictionaries sharing the same keys"""
    records = list(records)
    if columns is None:
        columns = list(records[0].keys()) if records else []
    return ReportTable(columns=columns, rows=[[record.get(c) for c in columns] for record in records])
