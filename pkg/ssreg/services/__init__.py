"""
服务层模块

每个 CLI 命令族对应一个服务
"""

from .base import BaseService
from .system_service import SystemService
from .identify_service import IdentifyService
from .montecarlo_service import MonteCarloService, MonteCarloSummary
from .tracking_service import TrackingService

# 服务实例
system_service = SystemService()
identify_service = IdentifyService(system_service)
montecarlo_service = MonteCarloService(system_service)
tracking_service = TrackingService(system_service)

__all__ = [
    "BaseService",
    "SystemService",
    "IdentifyService",
    "MonteCarloService",
    "MonteCarloSummary",
    "TrackingService",
    "system_service",
    "identify_service",
    "montecarlo_service",
    "tracking_service"
]
