"""
Data Exporter Module
Handles exporting tables and results to CSV, JSON and Excel
"""

import json
import math
from datetime import datetime
from io import BytesIO, StringIO
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from config import Config


def _jsonable(value: Any) -> Any:
    """Plain-Python copy of value with inf as the string "inf" and NaN as null"""
    if isinstance(value, pd.DataFrame):
        return [_jsonable(record) for record in value.to_dict(orient="records")]
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if hasattr(value, "value"):  # enums
        return value.value
    return value


class DataExporter:
    """
    Export analysis results to various formats
    """

    def __init__(self, analyzer=None):
        """
        Initialize exporter

        Args:
            analyzer: CutTimeAnalyzer instance, needed only for Excel reports
        """
        self.analyzer = analyzer

    def to_csv(self, df: pd.DataFrame) -> str:
        """
        Render a table as CSV

        '.' decimal separator, 15 significant digits, no index and "\\n"
        line endings, so identical tables give identical bytes.

        Args:
            df: Table to render

        Returns:
            str: CSV text
        """
        output = StringIO()
        df.to_csv(
            output,
            index=False,
            float_format=f"%.{Config.CSV_DIGITS}g",
            lineterminator="\n",
        )
        return output.getvalue()

    def to_json(self, obj: Any) -> str:
        """
        Render a result as JSON with sorted keys

        Args:
            obj: dict, list or DataFrame (rendered as a list of records)

        Returns:
            str: JSON text ending with a newline
        """
        return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def render(self, obj: Any, fmt: str) -> str:
        """CSV or JSON text of a table, record or list of records"""
        if fmt == "json":
            return self.to_json(obj)
        if isinstance(obj, dict):
            obj = pd.DataFrame([obj])
        return self.to_csv(obj)

    def export_to_excel(self, sheets: Optional[Dict[str, pd.DataFrame]] = None) -> BytesIO:
        """
        Export the analyzer tables to Excel with multiple sheets

        Args:
            sheets: Extra sheets to append, keyed by sheet name

        Returns:
            BytesIO: Excel file in memory
        """
        output = BytesIO()

        with pd.ExcelWriter(output, engine='openpyxl') as writer:
            # Sheet 1: Summary
            stats = self.analyzer.get_summary_stats()
            summary_df = pd.DataFrame({
                'Constant': list(stats.keys()),
                'Value': [str(_jsonable(value)) for value in stats.values()],
            })
            summary_df.to_excel(writer, sheet_name='Summary', index=False)

            # Sheet 2: Maxwell times
            self.analyzer.get_maxwell_table().to_excel(writer, sheet_name='Maxwell times', index=False)

            # Sheet 3: Cut times
            self.analyzer.get_cut_time_table().to_excel(writer, sheet_name='Cut times', index=False)

            # Sheet 4: Anomalies
            anomalies = self.analyzer.detect_anomalies()
            if anomalies:
                pd.DataFrame({'Anomaly': anomalies}).to_excel(writer, sheet_name='Anomalies', index=False)

            for name, df in (sheets or {}).items():
                df.to_excel(writer, sheet_name=name, index=False)

        output.seek(0)
        return output

    def get_filename(self, extension: str) -> str:
        """
        Generate filename with timestamp

        Args:
            extension: File extension (e.g., 'xlsx', 'csv')

        Returns:
            str: Filename
        """
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        return f"cartan_report_{timestamp}.{extension}"
