"""
命令行接口
"""

from .cli import build_parser, main

__all__ = ["build_parser", "main"]
