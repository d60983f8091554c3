"""
中间件模块
"""

from .error_handler import ErrorHandler, error_handler

__all__ = ["ErrorHandler", "error_handler"]
