"""
被控对象服务

按配置构造系统 (预设、文件或随机生成), 以及 gen-system 命令
"""

from dataclasses import dataclass
from pathlib import Path

from ..core.models import ExperimentConfig, SystemSpec
from ..dao import SystemDAO
from ..lti import LtiSystem, random_admissible_system, scalar_example_system
from ..utils.logger import LogCategory
from .base import BaseService


@dataclass(frozen=True)
class GenSystemResult:
    system: LtiSystem
    path: Path


class SystemService(BaseService):
    """被控对象服务"""

    category = LogCategory.LTI

    def build_system(self, spec: SystemSpec) -> LtiSystem:
        if spec.preset == "scalar":
            return scalar_example_system()
        if spec.path is not None:
            return SystemDAO.load(spec.path).require_admissible()
        return random_admissible_system(
            spec.n,
            spec.m,
            spec.output_dim,
            spec.r,
            seed=spec.seed,
            spectral_radius_target=spec.spectral_radius,
            max_resamples=self.settings.max_system_resamples,
        )

    def has_oracle(self, spec: SystemSpec) -> bool:
        """只给出数据文件时, 只有显式指定的系统才作为真值"""
        return spec.preset is not None or spec.path is not None

    def cmd_gen_system(self, config: ExperimentConfig) -> GenSystemResult:
        def run() -> GenSystemResult:
            system = self.build_system(config.system)
            path = SystemDAO.save(system, self.output_dir(config) / "system.json")
            self.log_info("系统已写出", path=str(path), n=system.n, m=system.m, p=system.p, r=system.r)
            return GenSystemResult(system=system, path=path)

        return self.safe_execute("gen-system", run)
