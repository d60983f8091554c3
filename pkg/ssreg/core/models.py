"""
核心数据模型

定义实验配置和枚举类型
"""

import json
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel as PydanticBaseModel, ConfigDict, Field, ValidationError, model_validator

from .exceptions import ConfigException


class BaseModel(PydanticBaseModel):
    """基础模型类"""

    model_config = ConfigDict(validate_assignment=True, extra="forbid")


class EstimationMethod(str, Enum):
    """增益辨识方法"""
    NOISE_FREE = "noise_free"
    DIFFERENCED = "differenced"
    ROLLING = "rolling"


class DisturbanceKind(str, Enum):
    """扰动信号类型"""
    ZERO = "zero"
    CONSTANT = "constant"
    IID_GAUSSIAN = "iid_gaussian"
    SINUSOID = "sinusoid"
    RANDOM_WALK = "random_walk"
    SINUSOID_WALK = "sinusoid_walk"


class StdSchedule(str, Enum):
    """高斯扰动的标准差调度"""
    CONSTANT = "constant"
    GEOMETRIC_DECAY = "geometric_decay"


class RunStatus(str, Enum):
    """闭环运行状态"""
    COMPLETED = "completed"
    DIVERGED = "diverged"


# ============ 实验配置模型 ============

class SystemSpec(BaseModel):
    """被控对象配置: 预设、文件或随机生成"""
    preset: Optional[str] = Field(default=None, description="预设系统: scalar")
    path: Optional[str] = Field(default=None, description="系统 JSON 文件路径")
    n: int = Field(default=2, ge=1, description="状态维数")
    m: int = Field(default=1, ge=1, description="输入维数")
    p: Optional[int] = Field(default=None, ge=1, description="输出维数 (默认等于 n)")
    r: int = Field(default=1, ge=1, description="扰动维数")
    seed: int = Field(default=1, description="系统生成种子")
    spectral_radius: float = Field(default=0.9, gt=0, lt=1, description="A 的目标谱半径")

    @model_validator(mode="after")
    def _check_dims(self) -> "SystemSpec":
        if self.preset is not None and self.preset != "scalar":
            raise ValueError(f"未知的预设系统: {self.preset}")
        if self.p is not None and self.p < self.n:
            raise ValueError("输出维数 p 必须不小于 n (C 需列满秩)")
        return self

    @property
    def output_dim(self) -> int:
        return self.p if self.p is not None else self.n


class CostSpec(BaseModel):
    """二次代价配置: Q_u = q_u I, Q_y = q_y I"""
    q_u: float = Field(default=1.0, gt=0, description="输入代价权重")
    q_y: float = Field(default=1.0, gt=0, description="输出代价权重")
    y_ref: Union[float, List[float]] = Field(default=0.0, description="输出参考值 (标量则广播)")


class DisturbanceSpec(BaseModel):
    """扰动信号配置"""
    kind: DisturbanceKind = Field(default=DisturbanceKind.ZERO, description="扰动类型")
    value: Union[float, List[float]] = Field(default=0.0, description="常值分量 (标量则广播)")
    std: float = Field(default=0.0, ge=0, description="高斯扰动标准差")
    schedule: StdSchedule = Field(default=StdSchedule.CONSTANT, description="标准差调度")
    decay_rate: float = Field(default=0.95, gt=0, le=1, description="几何衰减率")
    amplitude: float = Field(default=0.0, ge=0, description="正弦幅值")
    period: float = Field(default=200.0, gt=0, description="正弦周期 (步)")
    step_std: float = Field(default=0.0, ge=0, description="随机游走步长标准差")
    seed: int = Field(default=0, description="扰动种子")


class IdentificationSpec(BaseModel):
    """辨识阶段配置"""
    method: EstimationMethod = Field(default=EstimationMethod.NOISE_FREE, description="辨识方法")
    length: Optional[int] = Field(default=None, ge=1, description="输入样本数 T (默认取最小值)")
    n_bound: Optional[int] = Field(default=None, ge=1, description="状态维数上界 (默认取真实 n)")
    window_length: Optional[int] = Field(default=None, ge=2, description="滚动窗口长度")
    window_stride: int = Field(default=1, ge=1, description="滚动窗口步长")
    horizon: int = Field(default=400, ge=2, description="滚动辨识的数据流长度")
    random_initial_state: bool = Field(default=False, description="是否随机初始状态")
    data_path: Optional[str] = Field(default=None, description="轨迹 CSV 路径 (替代仿真数据)")
    save_hankel: bool = Field(default=False, description="写出输入的块 Hankel 矩阵 hankel_u.csv")


class ControlSpec(BaseModel):
    """在线梯度控制配置"""
    eta: Optional[float] = Field(default=None, gt=0, description="绝对步长")
    eta_fraction: float = Field(default=0.5, gt=0, description="步长占 eta* 的比例")
    epsilon: float = Field(default=0.5, gt=0, lt=1, description="证书参数 epsilon")
    horizon: int = Field(default=5000, ge=1, description="闭环仿真步数")
    g_hat_path: Optional[str] = Field(default=None, description="已辨识增益 estimate.json 路径")
    x0: Optional[List[float]] = Field(default=None, description="初始状态 (默认零)")
    u0: Optional[List[float]] = Field(default=None, description="初始输入 (默认零)")


class MonteCarloSpec(BaseModel):
    """Monte Carlo 增益误差实验配置"""
    trials: int = Field(default=200, ge=2, description="试验次数")
    horizon: int = Field(default=600, ge=2, description="每次试验的数据流长度")
    window_length: Optional[int] = Field(default=None, ge=2, description="滚动窗口长度 (默认取最小值)")
    n_bound: Optional[int] = Field(default=None, ge=1, description="状态维数上界")
    window_stride: int = Field(default=1, ge=1, description="滚动窗口步长")
    save_trials: bool = Field(default=False, description="是否写出逐次试验 CSV")


class ExperimentConfig(BaseModel):
    """实验总配置"""
    seed: int = Field(default=0, description="主随机种子")
    system: SystemSpec = Field(default_factory=SystemSpec)
    cost: CostSpec = Field(default_factory=CostSpec)
    disturbance: DisturbanceSpec = Field(default_factory=DisturbanceSpec)
    identification: IdentificationSpec = Field(default_factory=IdentificationSpec)
    control: ControlSpec = Field(default_factory=ControlSpec)
    montecarlo: MonteCarloSpec = Field(default_factory=MonteCarloSpec)
    output_dir: str = Field(default="out", description="输出目录")


def load_experiment_config(path: Optional[str] = None) -> ExperimentConfig:
    """从 JSON 文件加载实验配置, 未指定路径时返回默认配置"""
    if path is None:
        return ExperimentConfig()
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigException(f"配置文件不存在: {path}", {"path": path})
    try:
        payload = json.loads(config_path.read_text(encoding="utf-8"))
        return ExperimentConfig.model_validate(payload)
    except json.JSONDecodeError as e:
        raise ConfigException(f"配置文件不是合法 JSON: {e}", {"path": path})
    except ValidationError as e:
        raise ConfigException(f"配置验证失败: {e.error_count()} 处错误", {"errors": e.errors(include_url=False)})
