"""
线性时不变被控对象

x_{k+1} = A x_k + B u_k + E w_k,  y_k = C x_k

提供仿真、稳态增益、离散 Lyapunov 方程以及随机可容许系统的生成;
这些基于模型的结果只用于验证和计算步长证书, 控制器本身不依赖它们。
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import scipy.linalg as spla
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from .core.config import get_settings
from .core.exceptions import (
    ContractViolation,
    dimension_mismatch,
    generation_failure,
    ill_conditioned_system,
    lyapunov_residual,
    no_lyapunov_solution,
    numerical_overflow,
)
from .utils.logger import LogCategory, logger


def _as_matrix(value, name: str) -> np.ndarray:
    matrix = np.atleast_2d(np.asarray(value, dtype=float))
    if matrix.ndim != 2:
        raise dimension_mismatch(f"{name} 必须是二维矩阵", 2, matrix.ndim)
    if not np.all(np.isfinite(matrix)):
        raise ContractViolation(f"{name} 含有非有限值")
    return matrix


def as_signal(values, dim: Optional[int] = None, name: str = "signal") -> np.ndarray:
    """把序列整理成 (T, dim) 的时间优先数组; 一维输入视为标量信号"""
    signal = np.asarray(values, dtype=float)
    if signal.ndim == 1:
        signal = signal.reshape(-1, 1) if dim in (None, 1) else signal.reshape(-1, dim)
    if signal.ndim != 2:
        raise dimension_mismatch(f"{name} 必须是向量序列", "(T, dim)", signal.shape)
    if dim is not None and signal.shape[1] != dim:
        raise dimension_mismatch(f"{name} 的样本维数", dim, signal.shape[1])
    return signal


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def numerical_rank(matrix: np.ndarray, rtol: Optional[float] = None) -> int:
    """基于奇异值的数值秩: 小于 rtol * 最大奇异值的视为零"""
    if rtol is None:
        rtol = get_settings().rank_rtol
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return 0
    singular_values = spla.svdvals(matrix)
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > rtol * singular_values[0]))


def spectral_radius(A: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(_as_matrix(A, "A")))))


def is_schur_stable(A, tol: Optional[float] = None) -> bool:
    """特征值模长严格小于 1 (带容差)"""
    if tol is None:
        tol = get_settings().stability_tol
    A = _as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise dimension_mismatch("A 必须是方阵", (A.shape[0], A.shape[0]), A.shape)
    return spectral_radius(A) < 1.0 - tol


def controllability_matrix(A, B) -> np.ndarray:
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B")
    n = A.shape[0]
    if A.shape != (n, n) or B.shape[0] != n:
        raise dimension_mismatch("(A, B) 维数不一致", (n, "m"), B.shape)
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks)


def is_controllable(A, B, rtol: Optional[float] = None) -> bool:
    """rank [B, AB, ..., A^{n-1}B] == n"""
    n = _as_matrix(A, "A").shape[0]
    return numerical_rank(controllability_matrix(A, B), rtol) == n


def has_full_column_rank(C, rtol: Optional[float] = None) -> bool:
    """C 的列线性无关"""
    C = _as_matrix(C, "C")
    return numerical_rank(C, rtol) == C.shape[1]


@dataclass(frozen=True)
class LtiSystem:
    """被控对象矩阵 (A, B, C, E)"""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    E: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        n = A.shape[0]
        if A.shape != (n, n):
            raise dimension_mismatch("A 必须是方阵", (n, n), A.shape)
        B = _as_matrix(self.B, "B")
        C = _as_matrix(self.C, "C")
        E = _as_matrix(self.E, "E")
        if B.shape[0] != n:
            raise dimension_mismatch("B 的行数", n, B.shape[0])
        if C.shape[1] != n:
            raise dimension_mismatch("C 的列数", n, C.shape[1])
        if E.shape[0] != n:
            raise dimension_mismatch("E 的行数", n, E.shape[0])
        object.__setattr__(self, "A", _freeze(A))
        object.__setattr__(self, "B", _freeze(B))
        object.__setattr__(self, "C", _freeze(C))
        object.__setattr__(self, "E", _freeze(E))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def r(self) -> int:
        return self.E.shape[1]

    def assumption_violations(self) -> List[str]:
        """返回不满足的可容许性条件 (Schur 稳定、可控、C 列满秩)"""
        violations = []
        if not is_schur_stable(self.A):
            violations.append("schur_stability")
        if not is_controllable(self.A, self.B):
            violations.append("controllability")
        if self.p < self.n or not has_full_column_rank(self.C):
            violations.append("output_full_column_rank")
        return violations

    def is_admissible(self) -> bool:
        return not self.assumption_violations()

    def require_admissible(self) -> "LtiSystem":
        violations = self.assumption_violations()
        if violations:
            raise ContractViolation(f"系统不满足可容许性条件: {', '.join(violations)}",
                                    data={"violations": violations})
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, LtiSystem):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in "ABCE")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """对齐的输入/状态/输出/扰动序列, 均为 (长度, 维数) 数组

    输出 (以及状态) 可以比输入多一个样本: 辨识需要 u_{[0,T-1]} 和 y_{[0,T]}。
    """

    inputs: np.ndarray
    outputs: np.ndarray
    states: Optional[np.ndarray] = None
    disturbances: Optional[np.ndarray] = None

    def __post_init__(self):
        inputs = as_signal(self.inputs, name="inputs")
        outputs = as_signal(self.outputs, name="outputs")
        T = inputs.shape[0]
        if outputs.shape[0] not in (T, T + 1):
            raise dimension_mismatch("输出长度必须等于输入长度或多一个样本", (T, T + 1), outputs.shape[0])
        arrays = {"inputs": inputs, "outputs": outputs}
        if self.states is not None:
            states = as_signal(self.states, name="states")
            if states.shape[0] != outputs.shape[0]:
                raise dimension_mismatch("状态长度必须与输出长度一致", outputs.shape[0], states.shape[0])
            arrays["states"] = states
        if self.disturbances is not None:
            disturbances = as_signal(self.disturbances, name="disturbances")
            if disturbances.shape[0] != T:
                raise dimension_mismatch("扰动长度必须与输入长度一致", T, disturbances.shape[0])
            arrays["disturbances"] = disturbances
        for name, array in arrays.items():
            if not np.all(np.isfinite(array)):
                raise ContractViolation(f"轨迹 {name} 含有非有限值")
            object.__setattr__(self, name, _freeze(array))

    @property
    def length(self) -> int:
        """输入样本数 T"""
        return self.inputs.shape[0]

    @property
    def has_states(self) -> bool:
        return self.states is not None


@dataclass(frozen=True, eq=False)
class SteadyStateGains:
    """稳态增益 G = C(I-A)^{-1}B, H = C(I-A)^{-1}E 及状态层面的 Gbar, Hbar"""

    G: np.ndarray
    H: np.ndarray
    G_bar: np.ndarray
    H_bar: np.ndarray


def simulate(sys: LtiSystem, x0, inputs, disturbances=None) -> Trajectory:
    """从 x0 出发仿真 T 步, 返回 x_0..x_T 和 y_0..y_T"""
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != sys.n:
        raise dimension_mismatch("x0 维数", sys.n, x0.shape[0])
    if not np.all(np.isfinite(x0)):
        raise ContractViolation("x0 含有非有限值")
    u = as_signal(inputs, sys.m, "inputs")
    T = u.shape[0]
    if disturbances is None:
        w = np.zeros((T, sys.r))
    else:
        w = as_signal(disturbances, sys.r, "disturbances")
        if w.shape[0] != T:
            raise dimension_mismatch("扰动序列长度必须与输入一致", T, w.shape[0])

    states = np.empty((T + 1, sys.n))
    states[0] = x0
    forcing = u @ sys.B.T + w @ sys.E.T
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(T):
            states[k + 1] = sys.A @ states[k] + forcing[k]
    if not np.all(np.isfinite(states)):
        first_bad = int(np.argmax(~np.all(np.isfinite(states), axis=1)))
        raise numerical_overflow(first_bad)
    outputs = states @ sys.C.T
    return Trajectory(inputs=u, outputs=outputs, states=states, disturbances=w)


def steady_state_gains(sys: LtiSystem) -> SteadyStateGains:
    """基于模型的稳态增益, 通过 (I-A) 的 LU 分解求解, 不显式求逆"""
    I_minus_A = np.eye(sys.n) - sys.A
    condition = float(np.linalg.cond(I_minus_A))
    if not np.isfinite(condition) or condition > get_settings().condition_limit:
        raise ill_conditioned_system(condition)
    lu_piv = spla.lu_factor(I_minus_A)
    state_gains = spla.lu_solve(lu_piv, np.hstack([sys.B, sys.E]))
    G_bar = state_gains[:, :sys.m]
    H_bar = state_gains[:, sys.m:]
    return SteadyStateGains(
        G=_freeze(sys.C @ G_bar),
        H=_freeze(sys.C @ H_bar),
        G_bar=_freeze(G_bar),
        H_bar=_freeze(H_bar),
    )


def _require_positive_definite(Q: np.ndarray, name: str = "Q") -> np.ndarray:
    if Q.shape[0] != Q.shape[1]:
        raise dimension_mismatch(f"{name} 必须是方阵", (Q.shape[0], Q.shape[0]), Q.shape)
    if not np.allclose(Q, Q.T, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(Q).max())):
        raise ContractViolation(f"{name} 必须对称")
    try:
        np.linalg.cholesky(Q)
    except np.linalg.LinAlgError:
        raise ContractViolation(f"{name} 必须正定")
    return Q


def solve_discrete_lyapunov(A, Q) -> np.ndarray:
    """求解 A^T P A - P + Q = 0, 返回对称正定的 P"""
    A = _as_matrix(A, "A")
    Q = _require_positive_definite(_as_matrix(Q, "Q"))
    if A.shape != Q.shape:
        raise dimension_mismatch("A 与 Q 维数", A.shape, Q.shape)
    if not is_schur_stable(A):
        raise no_lyapunov_solution(spectral_radius(A))

    # scipy 求解 a X a^H - X + q = 0, 这里 a = A^T
    P = spla.solve_discrete_lyapunov(A.T, Q)
    P = 0.5 * (P + P.T)

    residual = float(np.linalg.norm(A.T @ P @ A - P + Q))
    tolerance = get_settings().lyapunov_rtol * float(np.linalg.norm(Q))
    if residual > tolerance:
        raise lyapunov_residual(residual, tolerance)
    return P


class _CandidateRejected(Exception):
    pass


def _draw_candidate(rng: np.random.Generator, n: int, m: int, p: int, r: int, target: float) -> LtiSystem:
    A = rng.standard_normal((n, n))
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    E = rng.standard_normal((n, r))
    radius = spectral_radius(A)
    if radius == 0.0:
        raise _CandidateRejected("nilpotent A")
    candidate = LtiSystem(A=A * (target / radius), B=B, C=C, E=E)
    violations = candidate.assumption_violations()
    if violations:
        raise _CandidateRejected(", ".join(violations))
    return candidate


def random_admissible_system(
    n: int,
    m: int,
    p: int,
    r: int,
    seed: int,
    spectral_radius_target: float = 0.9,
    max_resamples: Optional[int] = None
) -> LtiSystem:
    """高斯随机系统, A 重新缩放到目标谱半径, 拒绝不可控或 C 列不满秩的样本"""
    if min(n, m, p, r) < 1:
        raise ContractViolation("所有维数必须为正整数", data={"n": n, "m": m, "p": p, "r": r})
    if p < n:
        raise ContractViolation(f"输出维数 p={p} 小于 n={n}, C 不可能列满秩")
    if not 0.0 < spectral_radius_target < 1.0:
        raise ContractViolation(f"目标谱半径必须在 (0, 1) 内: {spectral_radius_target}")
    if max_resamples is None:
        max_resamples = get_settings().max_system_resamples

    rng = np.random.default_rng(seed)
    attempts = max_resamples + 1
    try:
        for attempt in Retrying(stop=stop_after_attempt(attempts),
                                retry=retry_if_exception_type(_CandidateRejected)):
            with attempt:
                system = _draw_candidate(rng, n, m, p, r, spectral_radius_target)
    except RetryError:
        raise generation_failure("随机可容许系统", attempts)

    logger.debug(
        "生成随机可容许系统",
        LogCategory.LTI,
        {"n": n, "m": m, "p": p, "r": r, "seed": seed, "attempts": attempt.retry_state.attempt_number}
    )
    return system


def scalar_example_system() -> LtiSystem:
    """标量示例: A=0.5, B=C=E=1"""
    return LtiSystem(A=[[0.5]], B=[[1.0]], C=[[1.0]], E=[[1.0]])
