"""
轨迹数据访问对象

列格式 k, u_0.., x_0.., y_0.., w_0..; 缺失的块不写入表头,
输入和扰动比输出少一个样本时最后一行对应单元格留空
"""

from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from ..core.exceptions import ConfigException, ErrorCodes, SsregException
from ..lti import Trajectory

FLOAT_FORMAT = "%.17g"


def _block(prefix: str, values: Optional[np.ndarray], rows: int) -> dict:
    if values is None:
        return {}
    padded = np.full((rows, values.shape[1]), np.nan)
    padded[:values.shape[0]] = values
    return {f"{prefix}_{i}": padded[:, i] for i in range(values.shape[1])}


def _columns(frame: pd.DataFrame, prefix: str) -> List[str]:
    names = [c for c in frame.columns if c.startswith(f"{prefix}_")]
    return sorted(names, key=lambda c: int(c.split("_", 1)[1]))


class TrajectoryDAO:
    """轨迹 CSV 读写"""

    @staticmethod
    def to_frame(traj: Trajectory) -> pd.DataFrame:
        rows = traj.outputs.shape[0]
        data = {"k": np.arange(rows)}
        data.update(_block("u", traj.inputs, rows))
        data.update(_block("x", traj.states, rows))
        data.update(_block("y", traj.outputs, rows))
        data.update(_block("w", traj.disturbances, rows))
        return pd.DataFrame(data)

    @staticmethod
    def save(traj: Trajectory, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        TrajectoryDAO.to_frame(traj).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    @staticmethod
    def load(path) -> Trajectory:
        path = Path(path)
        if not path.exists():
            raise ConfigException(f"轨迹文件不存在: {path}", {"path": str(path)})
        try:
            frame = pd.read_csv(path, float_precision="round_trip")
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise SsregException(f"轨迹文件无法解析: {e}", ErrorCodes.INVALID_FILE, {"path": str(path)}, exit_code=2)

        u_cols = _columns(frame, "u")
        y_cols = _columns(frame, "y")
        if not u_cols or not y_cols:
            raise SsregException("轨迹文件缺少输入或输出列", ErrorCodes.INVALID_FILE, {"path": str(path)}, exit_code=2)

        def present(columns: List[str]) -> Optional[np.ndarray]:
            if not columns:
                return None
            block = frame[columns].to_numpy(dtype=float)
            return block[~np.isnan(block).all(axis=1)]

        return Trajectory(
            inputs=present(u_cols),
            outputs=present(y_cols),
            states=present(_columns(frame, "x")),
            disturbances=present(_columns(frame, "w")),
        )
