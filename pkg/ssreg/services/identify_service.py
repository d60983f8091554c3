"""
增益辨识服务

生成或加载数据, 运行所选估计器, 写出 estimate.json、residuals.csv 和 trajectory.csv
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..core.exceptions import ConfigException, ErrorCodes, EstimatorException
from ..core.models import EstimationMethod, ExperimentConfig
from ..dao import ResultDAO, TrajectoryDAO
from ..disturbance import make_disturbance
from ..excitation import build_hankel, min_samples, random_pe_input
from ..identify import (
    GainEstimate,
    WindowEstimate,
    estimate_gain_constant_noise,
    estimate_gain_noise_free,
    minimum_window_length,
    rolling_estimate,
)
from ..lti import LtiSystem, Trajectory, simulate, steady_state_gains
from ..utils.logger import LogCategory
from ..utils.seeding import derive_seed
from .base import BaseService
from .system_service import SystemService

# 主种子派生出的随机源编号
INPUT_STREAM = 1
STATE_STREAM = 2
DISTURBANCE_STREAM = 3


@dataclass(frozen=True, eq=False)
class IdentifyResult:
    estimate: GainEstimate
    error_fro: Optional[float]
    windows: List[WindowEstimate]
    output_dir: Path


class IdentifyService(BaseService):
    """增益辨识服务"""

    category = LogCategory.IDENTIFY

    def __init__(self, system_service: Optional[SystemService] = None):
        super().__init__()
        self.system_service = system_service or SystemService()

    def required_inputs(self, method: EstimationMethod, m: int, n_bound: int, length: Optional[int]) -> int:
        """辨识所需的输入样本数, length 低于最小值时报配置错误"""
        minimum = min_samples(m, n_bound + 1)
        T = minimum if length is None else length
        if T < minimum:
            raise ConfigException(
                f"数据长度 T={T} 小于 {n_bound + 1} 阶持续激励所需的最小值 {minimum}",
                {"length": T, "minimum": minimum}
            )
        # 差分估计需要多一个输入样本
        return T + 1 if method == EstimationMethod.DIFFERENCED else T

    def generate_data(self, config: ExperimentConfig, system: LtiSystem, length: int, order: int) -> Trajectory:
        inputs = random_pe_input(system.m, length, order, derive_seed(config.seed, 0, INPUT_STREAM))
        if config.identification.random_initial_state:
            x0 = np.random.default_rng(derive_seed(config.seed, 0, STATE_STREAM)).standard_normal(system.n)
        else:
            x0 = np.zeros(system.n)
        disturbances = make_disturbance(config.disturbance, length, system.r,
                                        seed=derive_seed(config.disturbance.seed, 0, DISTURBANCE_STREAM))
        return simulate(system, x0, inputs, disturbances)

    def _single_window(self, estimate: GainEstimate, error: Optional[float]) -> WindowEstimate:
        return WindowEstimate(
            step=estimate.window_length,
            window_start=estimate.window_start,
            pe_ok=bool(estimate.pe_ok) if estimate.pe_ok is not None else True,
            estimate=estimate,
            error_fro=error if error is not None else float("nan"),
        )

    def cmd_identify(self, config: ExperimentConfig) -> IdentifyResult:
        return self.safe_execute("identify", self._identify, config)

    def _identify(self, config: ExperimentConfig) -> IdentifyResult:
        spec = config.identification
        out = self.output_dir(config)

        system = None
        if spec.data_path is None or self.system_service.has_oracle(config.system):
            system = self.system_service.build_system(config.system)
        n_bound = spec.n_bound or (system.n if system is not None else None)
        if n_bound is None:
            raise ConfigException("使用数据文件且没有真值系统时必须给出 n_bound")
        reference = steady_state_gains(system).G if system is not None else None

        if spec.data_path is not None:
            trajectory = TrajectoryDAO.load(spec.data_path)
        else:
            if spec.method == EstimationMethod.ROLLING:
                length = spec.horizon
            else:
                length = self.required_inputs(spec.method, system.m, n_bound, spec.length)
            trajectory = self.generate_data(config, system, length, n_bound + 1)
        TrajectoryDAO.save(trajectory, out / "trajectory.csv")

        u, y = trajectory.inputs, trajectory.outputs
        if spec.save_hankel and u.shape[0] >= n_bound + 1:
            ResultDAO.save_hankel(build_hankel(u, n_bound + 1), out / "hankel_u.csv")
        if spec.method == EstimationMethod.ROLLING:
            window_length = spec.window_length or minimum_window_length(u.shape[1], n_bound)
            windows = rolling_estimate(u, y, window_length, n_bound, reference_gain=reference,
                                       stride=spec.window_stride)
            usable = [w for w in windows if w.estimate is not None]
            if not usable:
                raise EstimatorException("所有滚动窗口均未给出估计", ErrorCodes.DATA_NOT_EXCITING,
                                         {"windows": len(windows)})
            estimate = usable[-1].estimate
        else:
            if spec.data_path is not None:
                self.required_inputs(spec.method, u.shape[1], n_bound,
                                     u.shape[0] - (1 if spec.method == EstimationMethod.DIFFERENCED else 0))
            if spec.method == EstimationMethod.DIFFERENCED:
                estimate = estimate_gain_constant_noise(u, y, n_bound)
            else:
                estimate = estimate_gain_noise_free(u, y, n_bound)
            windows = []

        error = estimate.error_to(reference) if reference is not None else None
        if not windows:
            windows = [self._single_window(estimate, error)]

        ResultDAO.save_estimate(estimate, out / "estimate.json", error_fro=error)
        ResultDAO.save_residuals(windows, out / "residuals.csv")
        self.log_info("增益辨识完成", method=estimate.method.value, error_fro=error,
                      residual_equality=estimate.residual_equality,
                      residual_identity=estimate.residual_identity)
        return IdentifyResult(estimate=estimate, error_fro=error, windows=windows, output_dir=out)
