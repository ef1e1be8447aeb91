"""
Data Processor Module
Handles target file loading, column mapping, cleaning and domain checks
for batch shooting
"""

import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import pandas as pd

from config import CLI_TEXT, Config
from utils.errors import InputError

logger = logging.getLogger(__name__)


class TargetProcessor:
    """
    Batch target processor with automatic column mapping
    """

    def __init__(self):
        self.required_columns = Config.REQUIRED_COLUMNS
        self.column_mappings = Config.COLUMN_MAPPINGS
        self.small_zv = Config.ILL_CONDITIONED_ZV

    def load_file(self, path: Union[str, Path]) -> pd.DataFrame:
        """
        Load Excel or CSV file

        Args:
            path: Path to a .csv or .xlsx file

        Returns:
            pd.DataFrame: Loaded dataframe

        Raises:
            InputError: If the format is not supported or the file is unreadable
        """
        file_extension = Path(path).suffix.lower().lstrip('.')
        if file_extension not in ('xlsx', 'csv'):
            raise InputError(CLI_TEXT["error_invalid_format"])

        try:
            if file_extension == 'xlsx':
                return pd.read_excel(path, engine='openpyxl')
            return pd.read_csv(path)
        except (OSError, ValueError) as e:
            raise InputError(f"Error loading file: {e}") from e

    def auto_map_columns(self, df: pd.DataFrame) -> pd.DataFrame:
        """
        Map accepted column variants ("X", "q_x", ...) to x, y, z, v, w

        Args:
            df: Original dataframe

        Returns:
            pd.DataFrame: Only the five coordinate columns, renamed

        Raises:
            InputError: If a coordinate column cannot be found
        """
        column_map = {}

        for standard_name, possible_names in self.column_mappings.items():
            exact = [col for col in df.columns if col in possible_names]
            if exact:
                column_map[exact[0]] = standard_name
                continue

            # Case-insensitive fallback
            lowered = [name.lower() for name in possible_names]
            loose = [col for col in df.columns if str(col).strip().lower() in lowered]
            if loose:
                column_map[loose[0]] = standard_name

        df_renamed = df.rename(columns=column_map)
        missing = [col for col in self.required_columns if col not in df_renamed.columns]

        if missing:
            available_cols = ", ".join(str(col) for col in df.columns)
            raise InputError(
                CLI_TEXT["error_missing_columns"].format(columns=", ".join(missing))
                + f". Available columns: {available_cols}"
            )

        return df_renamed[self.required_columns]

    def clean_data(self, df: pd.DataFrame) -> pd.DataFrame:
        """
        Coerce coordinates to floats and drop incomplete rows

        Args:
            df: Dataframe with the five coordinate columns

        Returns:
            pd.DataFrame: Cleaned dataframe; the index keeps the input row positions
        """
        df_clean = df.copy()
        for col in self.required_columns:
            df_clean[col] = pd.to_numeric(df_clean[col], errors='coerce')

        df_clean = df_clean.replace([np.inf, -np.inf], np.nan)
        dropped = len(df_clean) - len(df_clean.dropna())
        if dropped:
            logger.warning("dropped %d target rows with missing or non-numeric coordinates", dropped)
        return df_clean.dropna()

    def validate_data_quality(self, df: pd.DataFrame) -> List[str]:
        """
        Flag targets outside or near the edge of the uniqueness domain

        Args:
            df: Cleaned target dataframe indexed by input row position

        Returns:
            List[str]: Warning messages naming input rows, numbered from 1
        """
        warnings = []
        r2 = df['x'] ** 2 + df['y'] ** 2
        V = df['x'] * df['v'] + df['y'] * df['w'] - 0.5 * r2 * df['z']
        zv = df['z'] * V

        for index, value in zv.items():
            row = index + 1
            canonical = abs(value) / r2[index] ** 3 if value != 0.0 else 0.0
            if canonical <= Config.ZERO_ZV:
                warnings.append(CLI_TEXT["warning_zero_zv"].format(row=row))
                continue
            if canonical < self.small_zv:
                warnings.append(CLI_TEXT["warning_small_zv"].format(row=row, zv=canonical))

        for message in warnings:
            logger.warning(message)
        return warnings

    def process_file(self, path: Union[str, Path]) -> Tuple[pd.DataFrame, List[str]]:
        """
        Complete target processing pipeline

        Args:
            path: Path to the target file

        Returns:
            Tuple[pd.DataFrame, List[str]]: (targets, warnings)
        """
        df = self.load_file(path)
        df = self.auto_map_columns(df)
        df = self.clean_data(df)
        if df.empty:
            raise InputError("No usable target rows in the file")
        warnings = self.validate_data_quality(df)
        return df, warnings
