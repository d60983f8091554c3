"""
命令行入口

子命令: identify, montecarlo-gain, track, gen-system
"""

import argparse
import sys
from typing import List, Optional

from ..core.config import get_settings
from ..core.models import EstimationMethod, ExperimentConfig, load_experiment_config
from ..middleware.error_handler import error_handler
from ..services import identify_service, montecarlo_service, system_service, tracking_service
from ..utils.logger import logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssreg",
        description="数据驱动的稳态增益辨识与在线梯度控制实验",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_settings().app_version}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="实验配置 JSON 文件")
    common.add_argument("--seed", type=int, help="主随机种子")
    common.add_argument("--out", metavar="DIR", help="输出目录")

    identify = subparsers.add_parser("identify", parents=[common], help="辨识稳态增益")
    identify.add_argument("--method", choices=[m.value for m in EstimationMethod], help="辨识方法")
    identify.add_argument("--horizon", type=int, help="滚动辨识的数据流长度")

    montecarlo = subparsers.add_parser("montecarlo-gain", parents=[common], help="Monte Carlo 增益误差实验")
    montecarlo.add_argument("--trials", type=int, help="试验次数")
    montecarlo.add_argument("--horizon", type=int, help="每次试验的数据流长度")

    track = subparsers.add_parser("track", parents=[common], help="在线梯度跟踪控制")
    track.add_argument("--eta", type=float, help="绝对步长")
    track.add_argument("--eta-frac", type=float, dest="eta_frac", help="步长占 eta* 的比例")
    track.add_argument("--horizon", type=int, help="闭环仿真步数")

    subparsers.add_parser("gen-system", parents=[common], help="生成并写出系统 JSON")
    return parser


def apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """命令行参数覆盖配置文件中的字段"""
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.output_dir = args.out

    horizon = getattr(args, "horizon", None)
    if args.command == "identify":
        if args.method is not None:
            config.identification.method = EstimationMethod(args.method)
        if horizon is not None:
            config.identification.horizon = horizon
    elif args.command == "montecarlo-gain":
        if args.trials is not None:
            config.montecarlo.trials = args.trials
        if horizon is not None:
            config.montecarlo.horizon = horizon
    elif args.command == "track":
        if args.eta is not None:
            config.control.eta = args.eta
        if args.eta_frac is not None:
            config.control.eta_fraction = args.eta_frac
        if horizon is not None:
            config.control.horizon = horizon
    return config


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.6e}"


def _identify(config: ExperimentConfig):
    result = identify_service.cmd_identify(config)
    print(f"method={result.estimate.method.value} err_fro={_fmt(result.error_fro)} "
          f"residual_equality={_fmt(result.estimate.residual_equality)} "
          f"residual_identity={_fmt(result.estimate.residual_identity)}")


def _montecarlo(config: ExperimentConfig):
    summary = montecarlo_service.cmd_montecarlo_gain(config)
    print(f"trials={summary.trials} windows={summary.steps.shape[0]} final_mean_err_fro={_fmt(summary.final_mean)}")


def _track(config: ExperimentConfig):
    result = tracking_service.cmd_track(config)
    print(f"eta={_fmt(result.eta)} eta_star={_fmt(result.certificate.eta_star)} "
          f"eta_static={_fmt(result.certificate.eta_static)} "
          f"terminal_tracking_error={_fmt(result.record.terminal_error)}")


def _gen_system(config: ExperimentConfig):
    result = system_service.cmd_gen_system(config)
    print(f"system written to {result.path}")


COMMANDS = {
    "identify": _identify,
    "montecarlo-gain": _montecarlo,
    "track": _track,
    "gen-system": _gen_system,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.set_context(args.command)

    def run():
        config = apply_overrides(load_experiment_config(args.config), args)
        COMMANDS[args.command](config)

    return error_handler.run(args.command, run)


if __name__ == "__main__":
    sys.exit(main())
