"""
实验结果数据访问对象

所有浮点数以 %.17g 写出, 相同输入得到逐字节相同的文件
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..control import ClosedLoopRecord, StepSizeCertificate
from ..core.exceptions import ConfigException, ErrorCodes, SsregException
from ..excitation import HankelMatrix
from ..identify import GainEstimate, WindowEstimate
from .trajectory_dao import FLOAT_FORMAT

RESIDUAL_COLUMNS = ["k", "err_fro", "residual_equality", "residual_identity", "pe_ok"]
MC_GAIN_COLUMNS = ["k", "mean_err_fro", "std_err_fro", "lower_3std", "upper_3std", "mean_norm_w", "trials"]


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return ""
    return "1" if value else "0"


def _write_frame(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def _write_json(payload: Dict[str, Any], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


class ResultDAO:
    """估计、残差、跟踪记录、证书和 Monte Carlo 汇总的写出"""

    @staticmethod
    def save_estimate(estimate: GainEstimate, path, error_fro: Optional[float] = None) -> Path:
        payload = {
            "method": estimate.method.value,
            "G_hat": estimate.G_hat.tolist(),
            "residual_equality": estimate.residual_equality,
            "residual_identity": estimate.residual_identity,
            "window_start": estimate.window_start,
            "window_length": estimate.window_length,
            "pe_ok": estimate.pe_ok,
        }
        if error_fro is not None:
            payload["error_fro"] = error_fro
        return _write_json(payload, path)

    @staticmethod
    def load_gain(path) -> np.ndarray:
        """从 estimate.json 读取 G_hat"""
        path = Path(path)
        if not path.exists():
            raise ConfigException(f"增益文件不存在: {path}", {"path": str(path)})
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
            return np.atleast_2d(np.asarray(payload["G_hat"], dtype=float))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise SsregException(f"增益文件无法解析: {e}", ErrorCodes.INVALID_FILE, {"path": str(path)}, exit_code=2)

    @staticmethod
    def residual_frame(records: Sequence[WindowEstimate]) -> pd.DataFrame:
        return pd.DataFrame({
            "k": [record.step for record in records],
            "err_fro": [record.error_fro for record in records],
            "residual_equality": [record.residual_equality for record in records],
            "residual_identity": [record.residual_identity for record in records],
            "pe_ok": [_flag(record.pe_ok) for record in records],
        }, columns=RESIDUAL_COLUMNS)

    @staticmethod
    def save_residuals(records: Sequence[WindowEstimate], path) -> Path:
        return _write_frame(ResultDAO.residual_frame(records), path)

    @staticmethod
    def tracking_frame(record: ClosedLoopRecord) -> pd.DataFrame:
        K = record.length
        lyapunov = record.lyapunov_U if record.lyapunov_U is not None else np.full(K, np.nan)
        decrease = [""] * K
        if record.decrease_ok is not None:
            decrease[:K - 1] = [_flag(bool(flag)) for flag in record.decrease_ok]
        data = {
            "k": np.arange(K),
            "tracking_error": record.tracking_error,
            "lyapunov_U": lyapunov,
            "decrease_ok": decrease,
            "norm_dw": record.norm_dw,
        }
        data.update({f"u_{i}": record.inputs[:, i] for i in range(record.inputs.shape[1])})
        data.update({f"y_{i}": record.outputs[:, i] for i in range(record.outputs.shape[1])})
        return pd.DataFrame(data)

    @staticmethod
    def save_tracking(record: ClosedLoopRecord, path) -> Path:
        return _write_frame(ResultDAO.tracking_frame(record), path)

    @staticmethod
    def save_certificate(certificate: StepSizeCertificate, path, extra: Optional[Dict[str, Any]] = None) -> Path:
        payload = certificate.to_dict()
        if extra:
            payload.update(extra)
        return _write_json(payload, path)

    @staticmethod
    def save_mc_gain(frame: pd.DataFrame, path) -> Path:
        return _write_frame(frame[MC_GAIN_COLUMNS], path)

    @staticmethod
    def save_mc_trials(steps: Sequence[int], errors: np.ndarray, path) -> Path:
        """逐次试验误差, 长表格式 trial, k, err_fro"""
        trials, count = errors.shape
        frame = pd.DataFrame({
            "trial": np.repeat(np.arange(trials), count),
            "k": np.tile(np.asarray(steps), trials),
            "err_fro": errors.reshape(-1),
        })
        return _write_frame(frame, path)

    @staticmethod
    def load_mc_trials(path) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip")

    @staticmethod
    def save_hankel(hankel: HankelMatrix, path) -> Path:
        """首行 t,q,sigma 表头及取值, 随后逐行写出矩阵"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines: List[str] = ["t,q,sigma", f"{hankel.depth},{hankel.width},{hankel.block_dim}"]
        lines.extend(",".join(FLOAT_FORMAT % value for value in row) for row in hankel.entries)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path
