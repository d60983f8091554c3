"""
应用配置管理

统一的配置管理系统，所有数值容差都可以通过环境变量 (SSREG_*) 覆盖
"""

import os
from typing import Optional

import psutil
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_workers() -> int:
    """默认并发数：物理核心数"""
    return psutil.cpu_count(logical=False) or 1


class Settings(BaseSettings):
    """应用配置"""

    model_config = SettingsConfigDict(
        env_prefix="SSREG_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # 应用基础配置
    app_name: str = Field(default="ssreg", description="应用名称")
    app_version: str = Field(default="0.1.0", description="应用版本")

    # 日志配置
    log_level: str = Field(default="INFO", description="日志级别")
    log_format: str = Field(default="text", pattern="^(text|json)$", description="控制台日志格式: text 或 json")
    log_file: Optional[str] = Field(default=None, description="日志文件路径 (JSON 行)")

    # 并发配置
    workers: int = Field(default_factory=_default_workers, ge=1, description="Monte Carlo 最大并发数")

    # 数值容差
    rank_rtol: float = Field(default=1e-10, gt=0, description="秩判定的相对奇异值阈值")
    stability_tol: float = Field(default=1e-10, ge=0, description="单位圆附近的稳定性容差")
    membership_rtol: float = Field(default=1e-7, gt=0, description="轨迹成员判定的相对残差")
    residual_tol: float = Field(default=1e-6, gt=0, description="增益辨识方程的残差阈值")
    lyapunov_rtol: float = Field(default=1e-9, gt=0, description="Lyapunov 方程残差阈值 (相对 ||Q||)")
    condition_limit: float = Field(default=1e12, gt=1, description="I-A 条件数上限")
    divergence_threshold: float = Field(default=1e8, gt=0, description="闭环发散判定阈值 ||u||")

    # 随机生成
    max_system_resamples: int = Field(default=100, ge=0, description="随机系统的最大重采样次数")
    max_input_resamples: int = Field(default=10, ge=0, description="PE 输入的最大重采样次数")

    # 实验默认值
    default_trials: int = Field(default=200, ge=2, description="Monte Carlo 默认试验次数")
    output_dir: str = Field(default="out", description="输出目录")


# 全局配置实例
settings = Settings()


def get_settings() -> Settings:
    """获取配置实例"""
    return settings


def reload_settings() -> Settings:
    """重新从环境变量加载配置"""
    global settings
    settings = Settings()
    return settings


def create_output_dir(path: Optional[str] = None) -> str:
    """创建输出目录"""
    target = path or settings.output_dir
    os.makedirs(target, exist_ok=True)
    return target
