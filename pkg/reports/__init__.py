"""Report generation for the CEP pricing engine."""

from .full_report import Report, render_report, write_report

__all__ = ["Report", "render_report", "write_report"]
