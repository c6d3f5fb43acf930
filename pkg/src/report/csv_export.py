"""CSV export with a `# key: value` header block."""

import logging
from datetime import datetime
from pathlib import Path

import polars as pl

from src import __version__
from src.errors import ReportIOError
from src.models.experiment import ExperimentResult

logger = logging.getLogger(__name__)


def format_real(x: float) -> str:
    """Twelve significant digits."""
    return f"{x:.12g}"


def format_frame(df: pl.DataFrame) -> pl.DataFrame:
    """Render every float column at 12 significant digits; other columns untouched."""
    float_columns = [name for name, dtype in df.schema.items() if dtype.is_float()]
    if not float_columns:
        return df
    return df.with_columns(
        pl.col(name).map_elements(format_real, return_dtype=pl.String) for name in float_columns
    )


def header_lines(result: ExperimentResult) -> list[str]:
    config = result.config
    return [
        f"# mode: {config.mode.value}",
        f"# digit_set: {config.digit_set().to_text()}",
        f"# k_values: {','.join(str(k) for k in config.k_values)}",
        f"# version: {__version__}",
        f"# generated: {datetime.now().isoformat(timespec='seconds')}",
        f"# wall_time_seconds: {result.wall_time:.3f}",
    ]


def write_csv(df: pl.DataFrame, path: Path, header: list[str]) -> str:
    """Write the header block followed by an RFC-4180 body."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in header:
                f.write(line + "\n")
            format_frame(df).write_csv(f)
    except OSError as e:
        raise ReportIOError(f"cannot write {path}: {e}") from e
    return str(path)


def export_csv(result: ExperimentResult, output_dir: str = "output") -> list[str]:
    """
    Export the primary and auxiliary tables.

    Args:
        result: Experiment result
        output_dir: Output directory

    Returns:
        Paths of written files, primary table first
    """
    output_path = Path(output_dir)
    try:
        output_path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ReportIOError(f"cannot create {output_path}: {e}") from e

    stem = f"{result.config.mode.value}_{result.config.tag}"
    header = header_lines(result)
    paths = [write_csv(result.table, output_path / f"{stem}.csv", header)]
    for name, df in result.extra_tables.items():
        paths.append(write_csv(df, output_path / f"{stem}_{name}.csv", header + [f"# table: {name}"]))

    logger.info(f"Wrote {len(paths)} CSV files to {output_path}")
    return paths


def read_csv_body(path: str) -> pl.DataFrame:
    """Load a CSV written by export_csv, skipping its header block."""
    return pl.read_csv(path, comment_prefix="#", infer_schema=False)
