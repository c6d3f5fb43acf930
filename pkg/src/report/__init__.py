"""Report generation modules."""

from src.report.csv_export import export_csv, format_frame, read_csv_body
from src.report.json_export import export_json, load_result_json
from src.report.markdown_gen import MarkdownReportGenerator

__all__ = [
    "MarkdownReportGenerator",
    "export_csv",
    "export_json",
    "format_frame",
    "load_result_json",
    "read_csv_body",
]
