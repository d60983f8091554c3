"""
Monte Carlo 增益误差服务

在独立的扰动实现上运行滚动辨识, 按步汇总 ||G - G_hat||_F 的均值和标准差
"""

import warnings
from dataclasses import dataclass
from functools import partial
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from ..core.exceptions import ConfigException
from ..core.models import DisturbanceKind, ExperimentConfig, StdSchedule
from ..dao import ResultDAO
from ..disturbance import make_disturbance
from ..excitation import random_pe_input
from ..identify import minimum_window_length, rolling_estimate
from ..lti import LtiSystem, simulate, steady_state_gains
from ..utils.seeding import derive_seed
from ..utils.task_queue import TrialQueue
from .base import BaseService
from .system_service import SystemService

INPUT_STREAM = 0
DISTURBANCE_STREAM = 1


@dataclass(frozen=True, eq=False)
class MonteCarloSummary:
    """逐步误差统计; 标准差为样本标准差 (ddof=1)"""

    steps: np.ndarray
    mean_err: np.ndarray
    std_err: np.ndarray
    mean_norm_w: np.ndarray
    trials: int
    disturbance_kind: DisturbanceKind
    std_schedule: StdSchedule
    errors: Optional[np.ndarray] = None

    @property
    def final_mean(self) -> float:
        return float(self.mean_err[-1])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "k": self.steps,
            "mean_err_fro": self.mean_err,
            "std_err_fro": self.std_err,
            "lower_3std": self.mean_err - 3.0 * self.std_err,
            "upper_3std": self.mean_err + 3.0 * self.std_err,
            "mean_norm_w": self.mean_norm_w,
            "trials": np.full(self.steps.shape[0], self.trials),
        })


def aggregate_errors(errors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """按列求均值和样本标准差, 忽略被跳过的窗口 (NaN)"""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=RuntimeWarning)
        mean = np.nanmean(errors, axis=0)
        std = np.nanstd(errors, axis=0, ddof=1)
    return mean, np.nan_to_num(std, nan=0.0)


def _run_trial(
    index: int,
    config: ExperimentConfig,
    system: LtiSystem,
    reference: np.ndarray,
    window_length: int,
    n_bound: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    spec = config.montecarlo
    horizon = spec.horizon
    inputs = random_pe_input(system.m, horizon, n_bound + 1, derive_seed(config.seed, index, INPUT_STREAM))
    disturbances = make_disturbance(config.disturbance, horizon, system.r,
                                    seed=derive_seed(config.seed, index, DISTURBANCE_STREAM))
    trajectory = simulate(system, np.zeros(system.n), inputs, disturbances)
    records = rolling_estimate(trajectory.inputs, trajectory.outputs, window_length, n_bound,
                               reference_gain=reference, stride=spec.window_stride)
    steps = np.array([record.step for record in records])
    errors = np.array([record.error_fro for record in records])
    # 窗口在第 k 步用到的最新扰动是 w_{k-1}
    norm_w = np.linalg.norm(disturbances[steps - 1], axis=1)
    return steps, errors, norm_w


class MonteCarloService(BaseService):
    """Monte Carlo 增益误差服务"""

    def __init__(self, system_service: Optional[SystemService] = None):
        super().__init__()
        self.system_service = system_service or SystemService()

    def cmd_montecarlo_gain(self, config: ExperimentConfig) -> MonteCarloSummary:
        return self.safe_execute("montecarlo-gain", self._montecarlo, config)

    def _montecarlo(self, config: ExperimentConfig) -> MonteCarloSummary:
        spec = config.montecarlo
        if spec.trials < 2:
            raise ConfigException(f"试验次数至少为 2: {spec.trials}")
        system = self.system_service.build_system(config.system)
        reference = steady_state_gains(system).G
        n_bound = spec.n_bound or system.n
        window_length = spec.window_length or minimum_window_length(system.m, n_bound)
        if spec.horizon < window_length:
            raise ConfigException(
                f"数据流长度 {spec.horizon} 小于窗口长度 {window_length}",
                {"horizon": spec.horizon, "window_length": window_length}
            )

        trial = partial(_run_trial, config=config, system=system, reference=reference,
                        window_length=window_length, n_bound=n_bound)
        queue = TrialQueue(self.settings.workers)
        results = queue.run(trial, range(spec.trials))

        steps = results[0][0]
        errors = np.vstack([result[1] for result in results])
        norms = np.vstack([result[2] for result in results])
        mean, std = aggregate_errors(errors)
        summary = MonteCarloSummary(
            steps=steps,
            mean_err=mean,
            std_err=std,
            mean_norm_w=norms.mean(axis=0),
            trials=spec.trials,
            disturbance_kind=config.disturbance.kind,
            std_schedule=config.disturbance.schedule,
            errors=errors,
        )

        out = self.output_dir(config)
        ResultDAO.save_mc_gain(summary.to_frame(), out / "mc_gain.csv")
        if spec.save_trials:
            ResultDAO.save_mc_trials(steps, errors, out / "mc_trials.csv")
        self.log_info("Monte Carlo 完成", trials=spec.trials, windows=int(steps.shape[0]),
                      final_mean_err=summary.final_mean, **queue.get_queue_stats())
        return summary
