"""
Executor caching

One executor is cached per thread count, so a caller asking for a different
count never shuts down a pool another caller is still mapping on.
"""
import logging
import threading
from typing import Dict

from ..config import Config
from .base import ExecutorAdapter
from .serial_adapter import SerialAdapter
from .thread_pool_adapter import ThreadPoolAdapter

logger = logging.getLogger(__name__)

# Thread-safe executor caching
_executor_lock = threading.Lock()
_executors: Dict[int, ExecutorAdapter] = {}


def get_executor(config: Config) -> ExecutorAdapter:
    """
    Get the shared executor for the configured thread count

    Args:
        config: Configuration instance

    Returns:
        SerialAdapter for one thread, ThreadPoolAdapter otherwise
    """
    threads = config.get_threads()
    with _executor_lock:
        executor = _executors.get(threads)
        if executor is None:
            executor = SerialAdapter() if threads == 1 else ThreadPoolAdapter(threads)
            _executors[threads] = executor
            logger.debug("created %s with %d thread(s)", type(executor).__name__, threads)
    return executor


def reset_executor():
    """Shut down and forget every cached executor (useful for testing)"""
    with _executor_lock:
        executors = list(_executors.values())
        _executors.clear()
    for executor in executors:
        try:
            executor.shutdown()
        except RuntimeError as e:
            logger.warning("executor shutdown failed: %s", e)
