"""
Execution layer for toral-mass

Parallel work goes through an ExecutorAdapter, so services never depend on
a particular pool implementation.
"""
from .base import ExecutorAdapter
from .serial_adapter import SerialAdapter
from .thread_pool_adapter import ThreadPoolAdapter
from .pool import get_executor, reset_executor

__all__ = [
    'ExecutorAdapter',
    'SerialAdapter',
    'ThreadPoolAdapter',
    'get_executor',
    'reset_executor',
]
