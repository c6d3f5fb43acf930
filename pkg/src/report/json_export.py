"""JSON export utilities."""

import json
from pathlib import Path
from typing import Any

from src import __version__
from src.errors import ReportIOError
from src.models.experiment import ExperimentResult


def export_json(
    result: ExperimentResult,
    output_dir: str = "output",
) -> str:
    """
    Export an experiment result (summary plus every table) to JSON.

    Args:
        result: ExperimentResult to export
        output_dir: Output directory

    Returns:
        Path to exported file
    """
    output_path = Path(output_dir)
    filepath = output_path / f"{result.config.mode.value}_{result.config.tag}.json"

    data = {"version": __version__, **result.to_dict()}

    try:
        output_path.mkdir(parents=True, exist_ok=True)
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False, default=str)
    except OSError as e:
        raise ReportIOError(f"cannot write {filepath}: {e}") from e

    return str(filepath)


def load_result_json(filepath: str) -> dict[str, Any]:
    """
    Load an exported result.

    Args:
        filepath: Path to JSON file

    Returns:
        Dict representation of the result
    """
    with open(filepath, "r", encoding="utf-8") as f:
        return json.load(f)
