"""
跟踪控制服务

两阶段方案: 先用无噪声历史数据辨识 G_hat (或读取已有估计),
再计算步长证书并运行在线梯度闭环, 写出 tracking.csv 和 certificate.json
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..control import (
    ClosedLoopRecord,
    QuadraticCost,
    StepSizeCertificate,
    lyapunov_diagnostic,
    run_closed_loop,
    step_size_certificate,
)
from ..core.exceptions import DivergenceException, dimension_mismatch
from ..core.models import DisturbanceKind, DisturbanceSpec, ExperimentConfig
from ..dao import ResultDAO, TrajectoryDAO
from ..disturbance import make_disturbance
from ..excitation import min_samples, random_pe_input
from ..identify import estimate_gain_noise_free
from ..lti import LtiSystem, simulate, steady_state_gains
from ..utils.logger import LogCategory
from ..utils.seeding import derive_seed
from .base import BaseService
from .system_service import SystemService

HISTORY_STREAM = 10
DISTURBANCE_STREAM = 11


def default_tracking_disturbance(seed: int) -> DisturbanceSpec:
    """未配置扰动时使用正弦加随机游走"""
    return DisturbanceSpec(kind=DisturbanceKind.SINUSOID_WALK, amplitude=0.5, period=200.0,
                           step_std=0.005, seed=seed)


@dataclass(frozen=True, eq=False)
class TrackResult:
    record: ClosedLoopRecord
    certificate: StepSizeCertificate
    eta: float
    G_hat: np.ndarray
    output_dir: Path


class TrackingService(BaseService):
    """跟踪控制服务"""

    category = LogCategory.CONTROL

    def __init__(self, system_service: Optional[SystemService] = None):
        super().__init__()
        self.system_service = system_service or SystemService()

    def identify_offline(self, config: ExperimentConfig, system: LtiSystem, out: Path) -> np.ndarray:
        """第一阶段: 零扰动历史数据上的增益辨识"""
        n_bound = config.identification.n_bound or system.n
        length = max(config.identification.length or 0, min_samples(system.m, n_bound + 1))
        inputs = random_pe_input(system.m, length, n_bound + 1, derive_seed(config.seed, 0, HISTORY_STREAM))
        history = simulate(system, np.zeros(system.n), inputs)
        estimate = estimate_gain_noise_free(history.inputs, history.outputs, n_bound)
        TrajectoryDAO.save(history, out / "trajectory.csv")
        ResultDAO.save_estimate(estimate, out / "estimate.json",
                                error_fro=estimate.error_to(steady_state_gains(system).G))
        return estimate.G_hat

    def select_eta(self, config: ExperimentConfig, certificate: StepSizeCertificate) -> float:
        if config.control.eta is not None:
            return config.control.eta
        return config.control.eta_fraction * certificate.eta_star

    def cmd_track(self, config: ExperimentConfig) -> TrackResult:
        return self.safe_execute("track", self._track, config)

    def _track(self, config: ExperimentConfig) -> TrackResult:
        spec = config.control
        out = self.output_dir(config)
        system = self.system_service.build_system(config.system)
        gains = steady_state_gains(system)
        cost = QuadraticCost.isotropic(system.m, system.p, config.cost.q_u, config.cost.q_y, config.cost.y_ref)

        if spec.g_hat_path is not None:
            G_hat = ResultDAO.load_gain(spec.g_hat_path)
            if G_hat.shape != (system.p, system.m):
                raise dimension_mismatch("G_hat 维数", (system.p, system.m), G_hat.shape)
        else:
            G_hat = self.identify_offline(config, system, out)

        certificate = step_size_certificate(system, cost, gains.G, epsilon=spec.epsilon, gains=gains)
        eta = self.select_eta(config, certificate)

        disturbance_spec = config.disturbance
        if "disturbance" not in config.model_fields_set:
            disturbance_spec = default_tracking_disturbance(config.seed)
        disturbance = make_disturbance(disturbance_spec, spec.horizon + 1, system.r,
                                       seed=derive_seed(disturbance_spec.seed, 0, DISTURBANCE_STREAM))

        x0 = spec.x0 if spec.x0 is not None else np.zeros(system.n)
        u0 = spec.u0 if spec.u0 is not None else np.zeros(system.m)
        record = run_closed_loop(system, cost, G_hat, eta, x0, u0, disturbance, spec.horizon, gains=gains)

        if not record.diverged and eta > 0:
            diagnostic = lyapunov_diagnostic(system, cost, gains.G, gains.H, record, certificate, gains=gains)
            record = record.with_lyapunov(diagnostic.values, diagnostic.decrease_ok)

        ResultDAO.save_tracking(record, out / "tracking.csv")
        ResultDAO.save_certificate(certificate, out / "certificate.json", extra={
            "eta": eta,
            "status": record.status.value,
            "diverged_at": record.diverged_at,
            "terminal_tracking_error": None if record.diverged else record.terminal_error,
        })

        if record.diverged:
            raise DivergenceException(
                f"闭环在第 {record.diverged_at} 步发散 (eta={eta:.6g}, eta*={certificate.eta_star:.6g})",
                record.diverged_at,
                {"eta": eta, "eta_star": certificate.eta_star, "eta_static": certificate.eta_static}
            )

        self.log_info("跟踪完成", eta=eta, eta_star=certificate.eta_star,
                      terminal_tracking_error=record.terminal_error)
        return TrackResult(record=record, certificate=certificate, eta=eta, G_hat=G_hat, output_dir=out)
