"""
持续激励与 Hankel 矩阵

Hankel 矩阵构造、持续激励 (PE) 证书、激励输入设计,
以及行为系统理论中的秩恒等式和轨迹成员判定
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg as spla
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from .core.config import get_settings
from .core.exceptions import ContractViolation, dimension_mismatch, generation_failure, insufficient_data
from .lti import LtiSystem, Trajectory, as_signal, numerical_rank
from .utils.logger import LogCategory, logger


@dataclass(frozen=True, eq=False)
class HankelMatrix:
    """深度为 depth 的块 Hankel 矩阵, 第 j 列堆叠 z_j, ..., z_{j+depth-1}"""

    depth: int
    width: int
    block_dim: int
    entries: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        s = self.block_dim
        return self.entries[i * s:(i + 1) * s, j]

    def is_block_hankel(self) -> bool:
        """块 (i, j) 与块 (i-1, j+1) 相等"""
        s = self.block_dim
        for i in range(1, self.depth):
            upper = self.entries[(i - 1) * s:i * s, 1:]
            lower = self.entries[i * s:(i + 1) * s, :-1]
            if not np.array_equal(upper, lower):
                return False
        return True


@dataclass(frozen=True)
class PeCertificate:
    """持续激励证书"""

    order: int
    rank_found: int
    rank_required: int
    smallest_singular_value: float
    is_pe: bool
    insufficient_length: bool = False


def min_samples(sigma: int, t: int) -> int:
    """阶数 t 的持续激励所需的最少样本数 (sigma+1)t - 1"""
    if sigma < 1 or t < 1:
        raise ContractViolation(f"sigma 和 t 必须为正整数: sigma={sigma}, t={t}")
    return (sigma + 1) * t - 1


def build_hankel(signal, depth: int) -> HankelMatrix:
    signal = as_signal(signal)
    if depth < 1:
        raise ContractViolation(f"Hankel 深度必须为正: {depth}")
    T, sigma = signal.shape
    if T < depth:
        raise insufficient_data(depth, T, "Hankel 源信号")
    width = T - depth + 1
    entries = np.vstack([signal[i:i + width].T for i in range(depth)])
    return HankelMatrix(depth=depth, width=width, block_dim=sigma, entries=entries)


def persistency_certificate(signal, order: int, rtol: Optional[float] = None) -> PeCertificate:
    """检查信号是否为 order 阶持续激励; 长度不足时返回 is_pe=False 而不报错"""
    if rtol is None:
        rtol = get_settings().rank_rtol
    signal = as_signal(signal)
    T, sigma = signal.shape
    required = sigma * order

    if T < min_samples(sigma, order):
        rank = numerical_rank(build_hankel(signal, order).entries, rtol) if T >= order else 0
        return PeCertificate(order=order, rank_found=rank, rank_required=required,
                             smallest_singular_value=0.0, is_pe=False, insufficient_length=True)

    singular_values = spla.svdvals(build_hankel(signal, order).entries)
    if singular_values[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(singular_values > rtol * singular_values[0]))
    smallest = float(singular_values[required - 1]) if singular_values.size >= required else 0.0
    return PeCertificate(order=order, rank_found=rank, rank_required=required,
                         smallest_singular_value=smallest, is_pe=rank == required)


class _NotExciting(Exception):
    pass


def random_pe_input(m: int, T: int, order: int, seed: int, max_resamples: Optional[int] = None) -> np.ndarray:
    """独立同分布标准高斯输入, 直到通过 order 阶 PE 证书为止; 返回 (T, m) 数组"""
    required = min_samples(m, order)
    if T < required:
        raise insufficient_data(required, T, "激励输入")
    if max_resamples is None:
        max_resamples = get_settings().max_input_resamples

    rng = np.random.default_rng(seed)
    attempts = max_resamples + 1
    try:
        for attempt in Retrying(stop=stop_after_attempt(attempts),
                                retry=retry_if_exception_type(_NotExciting)):
            with attempt:
                candidate = rng.standard_normal((T, m))
                if not persistency_certificate(candidate, order).is_pe:
                    raise _NotExciting()
    except RetryError:
        raise generation_failure("持续激励输入", attempts)
    return candidate


def fundamental_lemma_rank_check(sys: LtiSystem, traj: Trajectory, L: int) -> bool:
    """rank [U_{L,q}; X_{1,q}] == L m + n"""
    if L < 1:
        raise ContractViolation(f"L 必须为正整数: {L}")
    if not traj.has_states:
        raise ContractViolation("秩检查需要状态序列")
    u = traj.inputs
    T = u.shape[0]
    if u.shape[1] != sys.m or traj.states.shape[1] != sys.n:
        raise dimension_mismatch("轨迹与系统维数", (sys.m, sys.n), (u.shape[1], traj.states.shape[1]))

    U = build_hankel(u, L)
    X = build_hankel(traj.states[:U.width], 1)
    rank = numerical_rank(np.vstack([U.entries, X.entries]))
    expected = L * sys.m + sys.n
    logger.debug("基本引理秩检查", LogCategory.EXCITATION, {"rank": rank, "expected": expected, "L": L, "T": T})
    return rank == expected


def trajectory_membership(
    data: Trajectory,
    candidate_u,
    candidate_y,
    L: int,
    rtol: Optional[float] = None
) -> Tuple[bool, float, np.ndarray]:
    """判断 (candidate_u, candidate_y) 是否落在 [U_{L,q}; Y_{L,q}] 的列空间内

    返回 (是否成员, 残差, 系数向量 alpha)
    """
    if rtol is None:
        rtol = get_settings().membership_rtol
    if L < 1:
        raise ContractViolation(f"L 必须为正整数: {L}")
    m = data.inputs.shape[1]
    p = data.outputs.shape[1]
    cu = as_signal(candidate_u, m, "candidate_u")
    cy = as_signal(candidate_y, p, "candidate_y")
    if cu.shape[0] != L or cy.shape[0] != L:
        raise dimension_mismatch("候选轨迹长度", L, (cu.shape[0], cy.shape[0]))

    T = data.length
    U = build_hankel(data.inputs, L)
    Y = build_hankel(data.outputs[:T], L)
    stacked = np.vstack([U.entries, Y.entries])
    target = np.concatenate([cu.reshape(-1), cy.reshape(-1)])

    alpha = spla.lstsq(stacked, target)[0]
    residual = float(np.linalg.norm(stacked @ alpha - target))
    is_member = residual <= rtol * (1.0 + float(np.linalg.norm(target)))
    return is_member, residual, alpha
