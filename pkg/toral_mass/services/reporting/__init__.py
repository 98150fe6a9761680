"""
Reporting services: report files, self-tests and the command runner
"""
from .report_service import ReportService, ReportTable
from .selftest_service import SelftestService
from .run_service import RunService, COMMANDS, load_experiment, parse_grid

__all__ = [
    'ReportService',
    'ReportTable',
    'SelftestService',
    'RunService',
    'COMMANDS',
    'load_experiment',
    'parse_grid',
]
