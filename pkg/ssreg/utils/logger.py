"""
结构化日志系统

每条记录是一个字典 (时间、级别、分类、消息、上下文、数据), 控制台按 SSREG_LOG_FORMAT
渲染为单行文本或 JSON, 日志文件始终写 JSON。日志只写到 stderr 或日志文件, 不进入实验产物。
"""

import json
import logging
import traceback
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ..core.config import get_settings


class LogCategory(Enum):
    """日志分类"""
    SYSTEM = "system"
    LTI = "lti"
    EXCITATION = "excitation"
    IDENTIFY = "identify"
    CONTROL = "control"
    HARNESS = "harness"
    PERFORMANCE = "performance"


def _jsonable(value: Any) -> Any:
    # numpy 标量与数组
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, Enum):
        return value.value
    return str(value)


class RecordFormatter(logging.Formatter):
    """把记录字典渲染为 JSON 或一行文本"""

    def __init__(self, style: str = "text"):
        super().__init__()
        self.style = style

    def format(self, record: logging.LogRecord) -> str:
        payload = getattr(record, "payload", None)
        if payload is None:
            return super().format(record)
        if self.style == "json":
            return json.dumps(payload, ensure_ascii=False, separators=(",", ":"), default=_jsonable)

        line = f"[{payload['level']}] {payload['timestamp']} [{payload['category']}] {payload['message']}"
        context = payload.get("context")
        if context:
            line += " (" + ", ".join(f"{key}={value}" for key, value in context.items()) + ")"
        if "data" in payload:
            line += " | " + json.dumps(payload["data"], ensure_ascii=False, default=_jsonable)
        if "exception" in payload:
            line += f"\n{payload['exception']['type']}: {payload['exception']['message']}"
        return line


class StructuredLogger:
    """结构化日志记录器"""

    def __init__(self, name: str = "ssreg"):
        self.name = name
        self.logger = logging.getLogger(name)
        self._context: Dict[str, Any] = {}
        self.configure()

    def configure(self):
        """按当前配置重建处理器"""
        settings = get_settings()
        level = getattr(logging, settings.log_level.upper(), logging.INFO)
        self.logger.setLevel(level)
        self.logger.handlers.clear()

        console = logging.StreamHandler()
        console.setFormatter(RecordFormatter(settings.log_format))
        self.logger.addHandler(console)

        if settings.log_file:
            path = Path(settings.log_file)
            path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(path, encoding="utf-8")
            file_handler.setFormatter(RecordFormatter("json"))
            self.logger.addHandler(file_handler)

        self.logger.propagate = False

    def set_context(self, command: Optional[str] = None, **fields):
        """设置附加到后续每条记录的上下文, 例如当前子命令"""
        self._context = {"command": command, **fields} if command else dict(fields)

    def log(
        self,
        level: int,
        message: str,
        category: LogCategory = LogCategory.SYSTEM,
        data: Optional[Dict[str, Any]] = None,
        exception: Optional[BaseException] = None
    ):
        if not self.logger.isEnabledFor(level):
            return
        payload: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": logging.getLevelName(level),
            "category": category.value,
            "message": message,
        }
        if self._context:
            payload["context"] = dict(self._context)
        if data:
            payload["data"] = data
        if exception is not None:
            payload["exception"] = {
                "type": type(exception).__name__,
                "message": str(exception),
                "traceback": "".join(traceback.format_exception(type(exception), exception, exception.__traceback__)),
            }
        self.logger.log(level, message, extra={"payload": payload})

    def debug(self, message: str, category: LogCategory = LogCategory.SYSTEM, data: Optional[Dict[str, Any]] = None):
        self.log(logging.DEBUG, message, category, data)

    def info(self, message: str, category: LogCategory = LogCategory.SYSTEM, data: Optional[Dict[str, Any]] = None):
        self.log(logging.INFO, message, category, data)

    def warning(self, message: str, category: LogCategory = LogCategory.SYSTEM,
                data: Optional[Dict[str, Any]] = None):
        self.log(logging.WARNING, message, category, data)

    def error(self, message: str, category: LogCategory = LogCategory.SYSTEM,
              data: Optional[Dict[str, Any]] = None, exception: Optional[BaseException] = None):
        self.log(logging.ERROR, message, category, data, exception)

    def log_performance_metric(
        self,
        metric_name: str,
        value: Union[int, float],
        unit: Optional[str] = None,
        tags: Optional[Dict[str, str]] = None
    ):
        """记录性能指标"""
        message = f"{metric_name} = {value}" + (f" {unit}" if unit else "")
        self.info(message, LogCategory.PERFORMANCE,
                  {"metric_name": metric_name, "value": value, "unit": unit, "tags": tags or {}})


# 全局日志记录器实例
logger = StructuredLogger()
