"""
统一错误处理

捕获命令执行中的异常, 记录结构化日志并转换为 CLI 退出码
"""

import sys
from typing import Any, Callable, TextIO

from pydantic import ValidationError

from ..core.exceptions import ErrorCodes, ExitCodes, SsregException
from ..utils.logger import LogCategory, StructuredLogger, logger


class ErrorHandler:
    """异常到退出码的映射"""

    def __init__(self, log: StructuredLogger = logger, stream: TextIO = None):
        self.logger = log
        self.stream = stream

    def _report(self, message: str):
        print(message, file=self.stream or sys.stderr)

    def exit_code_for(self, error: BaseException) -> int:
        if isinstance(error, SsregException):
            return error.exit_code
        if isinstance(error, ValidationError):
            return ExitCodes.CONFIG_ERROR
        return ExitCodes.UNEXPECTED

    def run(self, command: str, func: Callable[..., Any], *args, **kwargs) -> int:
        """执行命令并返回退出码"""
        try:
            func(*args, **kwargs)
            return ExitCodes.SUCCESS

        except SsregException as e:
            # 业务异常
            self.logger.warning(
                f"{command} 失败: {e.message}",
                LogCategory.HARNESS,
                {"code": e.code, "exit_code": e.exit_code, "data": e.data}
            )
            step = getattr(e, "step", None)
            suffix = f" (step {step})" if step is not None else ""
            self._report(f"error [{e.code}]: {e.message}{suffix}")
            return e.exit_code

        except ValidationError as e:
            # 命令行覆盖项未通过配置校验
            self.logger.warning(f"{command} 配置无效", LogCategory.HARNESS, {"errors": e.errors(include_url=False)})
            self._report(f"error [{ErrorCodes.CONFIGURATION_ERROR}]: 配置无效 ({e.error_count()} 处错误)")
            return ExitCodes.CONFIG_ERROR

        except Exception as e:
            # 未预期的错误
            self.logger.error(f"{command} 出现未预期的错误", LogCategory.HARNESS, {"error_type": type(e).__name__}, e)
            self._report(f"error: {type(e).__name__}: {e}")
            return ExitCodes.UNEXPECTED


error_handler = ErrorHandler()
