"""
工具模块
"""

from .logger import logger, LogCategory, StructuredLogger
from .seeding import derive_seed
from .task_queue import TrialQueue

__all__ = [
    "logger",
    "LogCategory",
    "StructuredLogger",
    "derive_seed",
    "TrialQueue"
]
