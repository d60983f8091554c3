"""
ssreg 核心架构模块

提供配置、异常和配置模型等基础设施
"""

from .config import Settings, get_settings
from .exceptions import SsregException, ErrorCodes, ExitCodes
from .models import BaseModel, ExperimentConfig, EstimationMethod, DisturbanceKind, RunStatus

__all__ = [
    "Settings",
    "get_settings",
    "SsregException",
    "ErrorCodes",
    "ExitCodes",
    "BaseModel",
    "ExperimentConfig",
    "EstimationMethod",
    "DisturbanceKind",
    "RunStatus"
]
