"""
基础服务类

定义所有服务的基础接口和通用功能
"""

import time
from abc import ABC
from pathlib import Path
from typing import Any

from ..core.config import Settings, create_output_dir, get_settings
from ..core.exceptions import SsregException
from ..core.models import ExperimentConfig
from ..utils.logger import LogCategory, logger


class BaseService(ABC):
    """基础服务类"""

    category = LogCategory.HARNESS

    def __init__(self):
        self.logger = logger

    @property
    def settings(self) -> Settings:
        return get_settings()

    def log_info(self, message: str, **kwargs):
        """记录信息日志"""
        self.logger.info(message, self.category, kwargs or None)

    def log_warning(self, message: str, **kwargs):
        """记录警告日志"""
        self.logger.warning(message, self.category, kwargs or None)

    def log_error(self, message: str, exception: BaseException = None, **kwargs):
        """记录错误日志"""
        self.logger.error(message, self.category, kwargs or None, exception)

    def output_dir(self, config: ExperimentConfig) -> Path:
        return Path(create_output_dir(config.output_dir))

    def safe_execute(self, operation_name: str, operation_func, *args, **kwargs) -> Any:
        """执行操作并记录耗时; 业务异常原样抛出"""
        started = time.perf_counter()
        try:
            self.log_info(f"开始执行操作: {operation_name}")
            result = operation_func(*args, **kwargs)
            self.log_info(f"操作完成: {operation_name}")
            return result
        except SsregException as e:
            self.log_warning(f"操作失败: {operation_name}", code=e.code, error=e.message)
            raise
        except Exception as e:
            self.log_error(f"操作异常: {operation_name}", exception=e)
            raise
        finally:
            self.logger.log_performance_metric(
                "operation_duration",
                round((time.perf_counter() - started) * 1000.0, 3),
                "ms",
                {"operation": operation_name}
            )
