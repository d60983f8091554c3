"""
数据访问层 (DAO)

平面文件的读写: 轨迹 CSV、系统 JSON 以及实验结果
"""

from .trajectory_dao import TrajectoryDAO
from .system_dao import SystemDAO
from .result_dao import ResultDAO

__all__ = [
    "TrajectoryDAO",
    "SystemDAO",
    "ResultDAO"
]
