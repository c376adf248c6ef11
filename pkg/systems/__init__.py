"""
Systems module for elw-lab.
Contains the reusable services around the engine: the restart worker pool and
report serialization.
"""

from .workers import RestartPool, resolve_thread_count
from .report import ReportWriter, envelope, render_csv, render_json

__all__ = [
    'RestartPool',
    'resolve_thread_count',
    'ReportWriter',
    'envelope',
    'render_csv',
    'render_json',
]
