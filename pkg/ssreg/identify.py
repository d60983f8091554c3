"""
数据驱动的稳态增益辨识

- 无噪声数据: 求解 [Y_diff; U] M = [0; I], 取 G_hat = Y M
- 常值扰动: 先对输入输出做一阶差分, 差分系统不含扰动, 再套用无噪声估计
- 时变扰动: 在滚动窗口上重复常值扰动估计, 丢弃旧样本
"""

from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as spla

from .core.config import get_settings
from .core.exceptions import (
    ConfigException,
    EstimatorException,
    dimension_mismatch,
    data_inconsistent,
    data_not_exciting,
    insufficient_data,
)
from .core.models import EstimationMethod
from .excitation import min_samples, persistency_certificate
from .lti import as_signal
from .utils.logger import LogCategory, logger
from .utils.task_queue import TrialQueue


@dataclass(frozen=True, eq=False)
class GainEstimate:
    """增益估计及求解诊断量"""

    G_hat: np.ndarray
    residual_equality: float
    residual_identity: float
    window_start: int
    window_length: int
    method: EstimationMethod
    pe_ok: Optional[bool] = None

    def error_to(self, G) -> float:
        """与参考增益的 Frobenius 误差"""
        G = np.atleast_2d(np.asarray(G, dtype=float))
        if G.shape != self.G_hat.shape:
            raise dimension_mismatch("参考增益维数", self.G_hat.shape, G.shape)
        return float(np.linalg.norm(self.G_hat - G, "fro"))


@dataclass(frozen=True, eq=False)
class DifferencedData:
    """差分数据 v_k = u_{k+1} - u_k, r_k = y_{k+1} - y_k"""

    v: np.ndarray
    r: np.ndarray


@dataclass(frozen=True, eq=False)
class WindowEstimate:
    """滚动窗口上的单次估计"""

    step: int
    window_start: int
    pe_ok: bool
    estimate: Optional[GainEstimate] = None
    error_fro: float = float("nan")
    failure: Optional[str] = None

    @property
    def residual_equality(self) -> float:
        return self.estimate.residual_equality if self.estimate is not None else float("nan")

    @property
    def residual_identity(self) -> float:
        return self.estimate.residual_identity if self.estimate is not None else float("nan")


def _check_lengths(u: np.ndarray, y: np.ndarray) -> None:
    if y.shape[0] != u.shape[0] + 1:
        raise dimension_mismatch("输出样本数必须比输入多一个", u.shape[0] + 1, y.shape[0])


def _solve_gain(u: np.ndarray, y: np.ndarray, tol: float) -> Tuple[np.ndarray, float, float]:
    """求最小范数 M 并返回 (G_hat, ||Y_diff M||, ||U M - I||)"""
    T, m = u.shape
    p = y.shape[1]
    U = u.T
    Y = y[:T].T
    Y_diff = np.diff(y, axis=0).T

    stacked = np.vstack([Y_diff, U])
    target = np.vstack([np.zeros((p, m)), np.eye(m)])
    M = spla.lstsq(stacked, target)[0]

    residual_identity = float(np.linalg.norm(U @ M - np.eye(m), "fro"))
    residual_equality = float(np.linalg.norm(Y_diff @ M, "fro"))
    if residual_identity > tol:
        raise data_not_exciting(residual_identity)
    if residual_equality > tol:
        raise data_inconsistent(residual_equality)
    return Y @ M, residual_equality, residual_identity


def estimate_gain_noise_free(
    u,
    y,
    n_bound: Optional[int] = None,
    tol: Optional[float] = None
) -> GainEstimate:
    """由 T 个输入和 T+1 个输出估计 G; 给出 n_bound 时附带 n_bound+1 阶 PE 检查结果"""
    if tol is None:
        tol = get_settings().residual_tol
    u = as_signal(u, name="u")
    y = as_signal(y, name="y")
    _check_lengths(u, y)

    pe_ok = None
    if n_bound is not None:
        pe_ok = persistency_certificate(u, n_bound + 1).is_pe
        if not pe_ok:
            logger.warning("输入不满足持续激励条件", LogCategory.IDENTIFY, {"order": n_bound + 1, "T": u.shape[0]})

    G_hat, residual_equality, residual_identity = _solve_gain(u, y, tol)
    return GainEstimate(
        G_hat=G_hat,
        residual_equality=residual_equality,
        residual_identity=residual_identity,
        window_start=0,
        window_length=u.shape[0],
        method=EstimationMethod.NOISE_FREE,
        pe_ok=pe_ok,
    )


def difference_signals(u, y) -> DifferencedData:
    u = as_signal(u, name="u")
    y = as_signal(y, name="y")
    if u.shape[0] < 2:
        raise insufficient_data(2, u.shape[0], "差分输入")
    if y.shape[0] < 2:
        raise insufficient_data(2, y.shape[0], "差分输出")
    return DifferencedData(v=np.diff(u, axis=0), r=np.diff(y, axis=0))


def _differenced_pe(u: np.ndarray, v: np.ndarray, order: int) -> bool:
    """PE 检查在差分输入 v 上进行, 同时检查原输入并在两者不一致时告警"""
    on_v = persistency_certificate(v, order).is_pe
    on_u = persistency_certificate(u, order).is_pe
    if on_v != on_u:
        logger.warning(
            "差分输入与原输入的持续激励结论不一致",
            LogCategory.IDENTIFY,
            {"order": order, "pe_on_differenced": on_v, "pe_on_input": on_u}
        )
    return on_v


def estimate_gain_constant_noise(
    u,
    y,
    n_bound: Optional[int] = None,
    tol: Optional[float] = None
) -> GainEstimate:
    """常值扰动下的增益估计: u 有 T+1 个样本, y 有 T+2 个样本"""
    if tol is None:
        tol = get_settings().residual_tol
    u = as_signal(u, name="u")
    y = as_signal(y, name="y")
    _check_lengths(u, y)
    data = difference_signals(u, y)

    pe_ok = _differenced_pe(u, data.v, n_bound + 1) if n_bound is not None else None
    G_hat, residual_equality, residual_identity = _solve_gain(data.v, data.r, tol)
    return GainEstimate(
        G_hat=G_hat,
        residual_equality=residual_equality,
        residual_identity=residual_identity,
        window_start=0,
        window_length=u.shape[0],
        method=EstimationMethod.DIFFERENCED,
        pe_ok=pe_ok,
    )


def minimum_window_length(m: int, n_bound: int) -> int:
    """滚动窗口的最小输入样本数: 差分输入需 n_bound+1 阶 PE"""
    return min_samples(m, n_bound + 1) + 1


def _estimate_window(
    step: int,
    u: np.ndarray,
    y: np.ndarray,
    window_length: int,
    order: int,
    tol: float,
    reference_gain: Optional[np.ndarray]
) -> WindowEstimate:
    start = step - window_length
    u_window = u[start:step]
    y_window = y[start:step + 1]
    data = difference_signals(u_window, y_window)

    if not persistency_certificate(data.v, order).is_pe:
        return WindowEstimate(step=step, window_start=start, pe_ok=False, failure="窗口数据不满足持续激励")

    try:
        G_hat, residual_equality, residual_identity = _solve_gain(data.v, data.r, tol)
    except EstimatorException as e:
        return WindowEstimate(step=step, window_start=start, pe_ok=True, failure=e.message)

    estimate = GainEstimate(
        G_hat=G_hat,
        residual_equality=residual_equality,
        residual_identity=residual_identity,
        window_start=start,
        window_length=window_length,
        method=EstimationMethod.ROLLING,
        pe_ok=True,
    )
    error = estimate.error_to(reference_gain) if reference_gain is not None else float("nan")
    return WindowEstimate(step=step, window_start=start, pe_ok=True, estimate=estimate, error_fro=error)


def rolling_estimate(
    inputs,
    outputs,
    window_length: int,
    n_bound: int,
    reference_gain=None,
    stride: int = 1,
    workers: int = 1,
    tol: Optional[float] = None
) -> List[WindowEstimate]:
    """在步 k = L_w, L_w+stride, ... 上用 u_{k-L_w..k-1} 和 y_{k-L_w..k} 估计增益

    结果按窗口起点排序; PE 不满足的窗口保留记录但不给出估计
    """
    if tol is None:
        tol = get_settings().residual_tol
    u = as_signal(inputs, name="inputs")
    y = as_signal(outputs, name="outputs")
    _check_lengths(u, y)
    if stride < 1:
        raise ConfigException(f"窗口步长必须为正整数: {stride}", {"stride": stride})

    minimum = minimum_window_length(u.shape[1], n_bound)
    if window_length < minimum:
        raise ConfigException(
            f"滚动窗口过短: 至少需要 {minimum} 个输入样本, 实际 {window_length}",
            {"window_length": window_length, "minimum": minimum, "n_bound": n_bound}
        )
    if u.shape[0] < window_length:
        raise insufficient_data(window_length, u.shape[0], "滚动辨识数据流")

    if reference_gain is not None:
        reference_gain = np.atleast_2d(np.asarray(reference_gain, dtype=float))

    steps = list(range(window_length, u.shape[0] + 1, stride))
    job = partial(
        _estimate_window,
        u=u,
        y=y,
        window_length=window_length,
        order=n_bound + 1,
        tol=tol,
        reference_gain=reference_gain,
    )
    records = TrialQueue(workers).run(job, steps)

    skipped = sum(1 for record in records if not record.pe_ok)
    if skipped:
        logger.warning("部分窗口因激励不足被跳过", LogCategory.IDENTIFY, {"skipped": skipped, "windows": len(records)})
    return records
