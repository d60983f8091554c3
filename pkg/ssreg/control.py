"""
在线梯度控制

u_{k+1} = u_k - eta * (grad_phi(u_k) + G_hat^T grad_psi(y_k))

控制器只使用 G_hat 和输出测量; 真实系统矩阵只用于计算最优解、
跟踪误差、步长证书和 Lyapunov 诊断。
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Sequence

import numpy as np
import scipy.linalg as spla
from scipy.spatial.distance import directed_hausdorff

from .core.config import get_settings
from .core.exceptions import CertificateConditionError, ContractViolation, dimension_mismatch
from .core.models import RunStatus
from .lti import LtiSystem, SteadyStateGains, as_signal, solve_discrete_lyapunov, steady_state_gains
from .utils.logger import LogCategory, logger


def _vector(value, dim: int, name: str) -> np.ndarray:
    vector = np.asarray(value, dtype=float).reshape(-1)
    if vector.shape[0] != dim:
        raise dimension_mismatch(f"{name} 维数", dim, vector.shape[0])
    return vector


def _gain(G) -> np.ndarray:
    return np.atleast_2d(np.asarray(G, dtype=float))


def _spectral_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix, 2))


# ============ 最优解集合 ============

@dataclass(frozen=True, eq=False)
class OptimizerSet:
    """有限点集表示的最优解集合; 强凸代价下是单点集"""

    points: np.ndarray

    @classmethod
    def singleton(cls, point) -> "OptimizerSet":
        return cls(points=np.atleast_2d(np.asarray(point, dtype=float)))

    @property
    def is_singleton(self) -> bool:
        return self.points.shape[0] == 1

    def representative(self) -> np.ndarray:
        return self.points[0]

    def distance_to(self, u) -> float:
        """点到集合的距离"""
        u = np.asarray(u, dtype=float).reshape(1, -1)
        return float(np.min(np.linalg.norm(self.points - u, axis=1)))


def hausdorff_distance(first: OptimizerSet, second: OptimizerSet) -> float:
    forward = directed_hausdorff(first.points, second.points)[0]
    backward = directed_hausdorff(second.points, first.points)[0]
    return float(max(forward, backward))


# ============ 代价函数 ============

class CostModel(ABC):
    """f(u) = phi(u) + psi(G u + H w) 的组成部分"""

    @property
    @abstractmethod
    def input_dim(self) -> int:
        pass

    @property
    @abstractmethod
    def output_dim(self) -> int:
        pass

    @property
    @abstractmethod
    def lipschitz_phi(self) -> float:
        pass

    @property
    @abstractmethod
    def lipschitz_psi(self) -> float:
        pass

    @abstractmethod
    def phi(self, u: np.ndarray) -> float:
        pass

    @abstractmethod
    def psi(self, y: np.ndarray) -> float:
        pass

    @abstractmethod
    def grad_phi(self, u: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def grad_psi(self, y: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def optimizer_set(self, G, H, w) -> OptimizerSet:
        pass

    @abstractmethod
    def pl_constant(self, G) -> float:
        """PL 常数 mu (可以是下界)"""

    def composite_lipschitz(self, G) -> float:
        """grad f 的 Lipschitz 常数上界 l_phi + ||G||^2 l_psi"""
        return self.lipschitz_phi + _spectral_norm(_gain(G)) ** 2 * self.lipschitz_psi

    def objective(self, u, G, H, w) -> float:
        u = np.asarray(u, dtype=float).reshape(-1)
        return self.phi(u) + self.psi(_gain(G) @ u + _gain(H) @ np.asarray(w, dtype=float).reshape(-1))

    def gradient(self, u, G, H, w) -> np.ndarray:
        u = np.asarray(u, dtype=float).reshape(-1)
        G = _gain(G)
        y = G @ u + _gain(H) @ np.asarray(w, dtype=float).reshape(-1)
        return self.grad_phi(u) + G.T @ self.grad_psi(y)

    def excess(self, u, G, H, w) -> float:
        """f(u) - f(u*)"""
        u_star = self.optimizer_set(G, H, w).representative()
        return self.objective(u, G, H, w) - self.objective(u_star, G, H, w)


class QuadraticCost(CostModel):
    """phi(u) = u^T Q_u u, psi(y) = (y - y_ref)^T Q_y (y - y_ref)"""

    def __init__(self, Q_u, Q_y, y_ref):
        self.Q_u = self._positive_definite(Q_u, "Q_u")
        self.Q_y = self._positive_definite(Q_y, "Q_y")
        self.y_ref = _vector(y_ref, self.Q_y.shape[0], "y_ref")
        self._lipschitz_phi = 2.0 * float(np.max(np.linalg.eigvalsh(self.Q_u)))
        self._lipschitz_psi = 2.0 * float(np.max(np.linalg.eigvalsh(self.Q_y)))

    @staticmethod
    def _positive_definite(value, name: str) -> np.ndarray:
        matrix = np.atleast_2d(np.asarray(value, dtype=float))
        if matrix.shape[0] != matrix.shape[1]:
            raise dimension_mismatch(f"{name} 必须是方阵", (matrix.shape[0], matrix.shape[0]), matrix.shape)
        if not np.allclose(matrix, matrix.T):
            raise ContractViolation(f"{name} 必须对称")
        if np.min(np.linalg.eigvalsh(matrix)) <= 0.0:
            raise ContractViolation(f"{name} 必须正定")
        return matrix

    @classmethod
    def isotropic(cls, m: int, p: int, q_u: float = 1.0, q_y: float = 1.0, y_ref=0.0) -> "QuadraticCost":
        """Q_u = q_u I, Q_y = q_y I, 标量 y_ref 广播到 p 维"""
        reference = np.asarray(y_ref, dtype=float).reshape(-1)
        if reference.size == 1:
            reference = np.full(p, float(reference[0]))
        return cls(q_u * np.eye(m), q_y * np.eye(p), reference)

    @property
    def input_dim(self) -> int:
        return self.Q_u.shape[0]

    @property
    def output_dim(self) -> int:
        return self.Q_y.shape[0]

    @property
    def lipschitz_phi(self) -> float:
        return self._lipschitz_phi

    @property
    def lipschitz_psi(self) -> float:
        return self._lipschitz_psi

    def phi(self, u) -> float:
        return float(u @ self.Q_u @ u)

    def psi(self, y) -> float:
        e = y - self.y_ref
        return float(e @ self.Q_y @ e)

    def grad_phi(self, u) -> np.ndarray:
        return 2.0 * self.Q_u @ u

    def grad_psi(self, y) -> np.ndarray:
        return 2.0 * self.Q_y @ (y - self.y_ref)

    def normal_matrix(self, G) -> np.ndarray:
        """Q_u + G^T Q_y G"""
        G = _gain(G)
        if G.shape != (self.output_dim, self.input_dim):
            raise dimension_mismatch("G 维数", (self.output_dim, self.input_dim), G.shape)
        return self.Q_u + G.T @ self.Q_y @ G

    def minimizer(self, G, H, w) -> np.ndarray:
        """求解 (Q_u + G^T Q_y G) u* = G^T Q_y (y_ref - H w)"""
        G = _gain(G)
        H = _gain(H)
        w = _vector(w, H.shape[1], "w")
        normal = self.normal_matrix(G)
        rhs = G.T @ self.Q_y @ (self.y_ref - H @ w)
        try:
            return spla.solve(normal, rhs, assume_a="pos")
        except spla.LinAlgError:
            raise ContractViolation("法方程矩阵奇异")

    def optimizer_set(self, G, H, w) -> OptimizerSet:
        return OptimizerSet.singleton(self.minimizer(G, H, w))

    def pl_constant(self, G) -> float:
        return float(np.min(np.linalg.eigvalsh(self.normal_matrix(G))))

    def composite_lipschitz(self, G) -> float:
        return 2.0 * float(np.max(np.linalg.eigvalsh(self.normal_matrix(G))))

    def excess(self, u, G, H, w) -> float:
        # f 是二次的, f(u) - f(u*) 等于 (u-u*)^T N (u-u*)
        e = np.asarray(u, dtype=float).reshape(-1) - self.minimizer(G, H, w)
        return float(e @ self.normal_matrix(G) @ e)


# ============ 控制器与最优解 ============

def controller_step(u, y, G_hat, cost: CostModel, eta: float) -> np.ndarray:
    """一步在线梯度更新"""
    if eta < 0:
        raise ContractViolation(f"步长必须非负: {eta}")
    G_hat = _gain(G_hat)
    if G_hat.shape != (cost.output_dim, cost.input_dim):
        raise dimension_mismatch("G_hat 维数", (cost.output_dim, cost.input_dim), G_hat.shape)
    u = _vector(u, cost.input_dim, "u")
    y = _vector(y, cost.output_dim, "y")
    return u - eta * (cost.grad_phi(u) + G_hat.T @ cost.grad_psi(y))


def optimizer(cost: CostModel, G, H, w) -> np.ndarray:
    """扰动 w 下的最优输入 u*"""
    return cost.optimizer_set(G, H, w).representative()


# ============ 步长证书 ============

@dataclass(frozen=True, eq=False)
class StepSizeCertificate:
    """保证收敛的步长上界及其全部常数"""

    epsilon: float
    Q: np.ndarray
    P: np.ndarray
    ell: float
    a: float
    b: float
    eta_star: float
    eta_static: float
    lambda_min_Q: float
    ell_phi: float
    ell_psi: float
    b2: float
    gpH_norm: float

    @property
    def a1(self) -> float:
        return self.a / self.epsilon

    def a2(self, eta: float) -> float:
        return self.ell / (2.0 * eta)

    def b3(self, eta: float) -> float:
        """2 eta^2 ||G_bar^T P H_bar||^2 / eps, 来自 2 eta F^T G_bar^T P H_bar dw 的配方"""
        return 2.0 * eta ** 2 * self.gpH_norm ** 2 / self.epsilon

    def alpha3_coefficient(self, eta: float) -> float:
        """min{(1-eps) - eta l/2 - eta b, (1-eps) lambda_min(Q) - a1}; eta < eta* 时为正"""
        return min(
            (1.0 - self.epsilon) - eta * self.ell / 2.0 - eta * self.b,
            (1.0 - self.epsilon) * self.lambda_min_Q - self.a1,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "ell": self.ell,
            "ell_phi": self.ell_phi,
            "ell_psi": self.ell_psi,
            "a": self.a,
            "a1": self.a1,
            "b": self.b,
            "b2": self.b2,
            "gpH_norm": self.gpH_norm,
            "lambda_min_Q": self.lambda_min_Q,
            "eta_star": self.eta_star,
            "eta_static": self.eta_static,
        }


def step_size_certificate(
    sys: LtiSystem,
    cost: CostModel,
    G,
    epsilon: float = 0.5,
    Q=None,
    gains: Optional[SteadyStateGains] = None
) -> StepSizeCertificate:
    if not 0.0 < epsilon < 1.0:
        raise ContractViolation(f"epsilon 必须在 (0, 1) 内: {epsilon}")
    sys.require_admissible()
    if gains is None:
        gains = steady_state_gains(sys)
    G = _gain(G)
    G_norm = _spectral_norm(G)
    C_norm = _spectral_norm(sys.C)

    ell = cost.lipschitz_phi + G_norm ** 2 * cost.lipschitz_psi
    a = 0.5 * cost.lipschitz_psi ** 2 * C_norm ** 2 * G_norm ** 2
    threshold = a / (epsilon * (1.0 - epsilon))

    if Q is None:
        kappa = 1.01 * threshold if a > 0 else 1.0
        Q = kappa * np.eye(sys.n)
    else:
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape != (sys.n, sys.n):
            raise dimension_mismatch("Q 维数", (sys.n, sys.n), Q.shape)
    lambda_min_Q = float(np.min(np.linalg.eigvalsh(0.5 * (Q + Q.T))))
    if lambda_min_Q <= threshold:
        raise CertificateConditionError(
            f"lambda_min(Q) = {lambda_min_Q:.6g} 不大于 a/(eps(1-eps)) = {threshold:.6g}",
            {"lambda_min_Q": lambda_min_Q, "threshold": threshold}
        )

    P = solve_discrete_lyapunov(sys.A, Q)
    G_bar, H_bar = gains.G_bar, gains.H_bar
    b = (2.0 * _spectral_norm(sys.A.T @ P @ G_bar) ** 2 / (epsilon * lambda_min_Q)
         + _spectral_norm(G_bar.T @ P @ G_bar))
    b2 = (2.0 * _spectral_norm(sys.A.T @ P @ H_bar) ** 2 / (epsilon * lambda_min_Q)
          + _spectral_norm(H_bar.T @ P @ H_bar))

    certificate = StepSizeCertificate(
        epsilon=epsilon,
        Q=Q,
        P=P,
        ell=ell,
        a=a,
        b=b,
        eta_star=(1.0 - epsilon) / (ell / 2.0 + b),
        eta_static=2.0 / ell,
        lambda_min_Q=lambda_min_Q,
        ell_phi=cost.lipschitz_phi,
        ell_psi=cost.lipschitz_psi,
        b2=b2,
        gpH_norm=_spectral_norm(G_bar.T @ P @ H_bar),
    )
    logger.info("步长证书", LogCategory.CONTROL, certificate.to_dict())
    return certificate


# ============ 闭环仿真 ============

@dataclass(frozen=True, eq=False)
class ClosedLoopRecord:
    """闭环轨迹; 所有逐步数组的第一维为记录步数 K"""

    inputs: np.ndarray
    states: np.ndarray
    outputs: np.ndarray
    disturbances: np.ndarray
    optimizers: np.ndarray
    tracking_error: np.ndarray
    norm_du_star: np.ndarray
    norm_dw: np.ndarray
    eta: float
    horizon: int
    status: RunStatus = RunStatus.COMPLETED
    diverged_at: Optional[int] = None
    lyapunov_U: Optional[np.ndarray] = None
    decrease_ok: Optional[np.ndarray] = None

    @property
    def length(self) -> int:
        return self.inputs.shape[0]

    @property
    def diverged(self) -> bool:
        return self.status == RunStatus.DIVERGED

    @property
    def terminal_error(self) -> float:
        return float(self.tracking_error[-1])

    def with_lyapunov(self, values: np.ndarray, decrease_ok: np.ndarray) -> "ClosedLoopRecord":
        return replace(self, lyapunov_U=values, decrease_ok=decrease_ok)


def _extend_disturbance(disturbance, r: int, required: int, horizon: int) -> np.ndarray:
    w = as_signal(disturbance, r, "disturbance")
    if w.shape[0] < horizon:
        raise ContractViolation(f"扰动序列长度 {w.shape[0]} 小于仿真步数 {horizon}")
    if w.shape[0] < required:
        # 末尾样本保持不变
        w = np.vstack([w, np.repeat(w[-1:], required - w.shape[0], axis=0)])
    return w[:required]


def run_closed_loop(
    sys: LtiSystem,
    cost: CostModel,
    G_hat,
    eta: float,
    x0,
    u0,
    disturbance,
    horizon: int,
    gains: Optional[SteadyStateGains] = None
) -> ClosedLoopRecord:
    """先测量 y_k, 再用 y_k 更新输入; 记录 k = 0..horizon 的全部样本"""
    if horizon < 1:
        raise ContractViolation(f"仿真步数必须为正: {horizon}")
    if eta < 0:
        raise ContractViolation(f"步长必须非负: {eta}")
    if (cost.input_dim, cost.output_dim) != (sys.m, sys.p):
        raise dimension_mismatch("代价函数与系统维数", (sys.m, sys.p), (cost.input_dim, cost.output_dim))
    if gains is None:
        gains = steady_state_gains(sys)
    threshold = get_settings().divergence_threshold

    x = _vector(x0, sys.n, "x0")
    u = _vector(u0, sys.m, "u0")
    w = _extend_disturbance(disturbance, sys.r, horizon + 2, horizon)
    u_star_all = np.array([optimizer(cost, gains.G, gains.H, w_k) for w_k in w])

    inputs, states, outputs = [], [], []
    status, diverged_at = RunStatus.COMPLETED, None
    for k in range(horizon + 1):
        y = sys.C @ x
        inputs.append(u)
        states.append(x)
        outputs.append(y)
        if k == horizon:
            break
        with np.errstate(over="ignore", invalid="ignore"):
            u_next = controller_step(u, y, G_hat, cost, eta)
            x = sys.A @ x + sys.B @ u + sys.E @ w[k]
        u = u_next
        if not np.all(np.isfinite(u)) or np.linalg.norm(u) > threshold or not np.all(np.isfinite(x)):
            status, diverged_at = RunStatus.DIVERGED, k + 1
            logger.warning("闭环发散", LogCategory.CONTROL, {"step": diverged_at, "eta": eta})
            break

    K = len(inputs)
    inputs = np.array(inputs)
    states = np.array(states)
    u_star = u_star_all[:K]
    x_star = u_star @ gains.G_bar.T + w[:K] @ gains.H_bar.T
    tracking_error = np.sqrt(
        np.sum((states - x_star) ** 2, axis=1) + np.sum((inputs - u_star) ** 2, axis=1)
    )
    return ClosedLoopRecord(
        inputs=inputs,
        states=states,
        outputs=np.array(outputs),
        disturbances=w[:K].copy(),
        optimizers=u_star,
        tracking_error=tracking_error,
        norm_du_star=np.linalg.norm(u_star_all[1:K + 1] - u_star, axis=1),
        norm_dw=np.linalg.norm(w[1:K + 1] - w[:K], axis=1),
        eta=float(eta),
        horizon=horizon,
        status=status,
        diverged_at=diverged_at,
    )


@dataclass(frozen=True, eq=False)
class StaticLoopResult:
    """无动态被控对象 y = G u + H w 上的梯度迭代"""

    inputs: np.ndarray
    errors: np.ndarray
    status: RunStatus
    diverged_at: Optional[int] = None


def run_static_loop(cost: CostModel, G, H, disturbance, eta: float, u0, horizon: int) -> StaticLoopResult:
    """eta < 2/l 时收敛到 u*, 超过后发散"""
    if horizon < 1:
        raise ContractViolation(f"仿真步数必须为正: {horizon}")
    G = _gain(G)
    H = _gain(H)
    w = _extend_disturbance(disturbance, H.shape[1], horizon + 1, horizon)
    threshold = get_settings().divergence_threshold

    u = _vector(u0, cost.input_dim, "u0")
    inputs, errors = [], []
    status, diverged_at = RunStatus.COMPLETED, None
    for k in range(horizon + 1):
        inputs.append(u)
        errors.append(np.linalg.norm(u - optimizer(cost, G, H, w[k])))
        if k == horizon:
            break
        with np.errstate(over="ignore", invalid="ignore"):
            u = u - eta * cost.gradient(u, G, H, w[k])
        if not np.all(np.isfinite(u)) or np.linalg.norm(u) > threshold:
            status, diverged_at = RunStatus.DIVERGED, k + 1
            break
    return StaticLoopResult(inputs=np.array(inputs), errors=np.array(errors), status=status, diverged_at=diverged_at)


# ============ Lyapunov 诊断 ============

@dataclass(frozen=True, eq=False)
class LyapunovDiagnostic:
    """U_k = V(u_k) + W(x_tilde_k) 及逐步 ISS 下降不等式的检查结果"""

    values: np.ndarray
    increments: np.ndarray
    bounds: np.ndarray
    decrease_ok: np.ndarray
    dissipation: np.ndarray
    sigma: np.ndarray
    drift: np.ndarray
    sigma_ok: np.ndarray

    @property
    def all_ok(self) -> bool:
        return bool(np.all(self.decrease_ok))

    @property
    def violation_rate(self) -> float:
        if self.decrease_ok.size == 0:
            return 0.0
        return float(np.mean(~self.decrease_ok))

    def pairs(self) -> Sequence:
        """(U_k, decrease_ok_k); 最后一步没有下一步, 记为 True"""
        flags = np.append(self.decrease_ok, True)
        return list(zip(self.values.tolist(), flags.tolist()))


def lyapunov_diagnostic(
    sys: LtiSystem,
    cost: CostModel,
    G,
    H,
    record: ClosedLoopRecord,
    certificate: StepSizeCertificate,
    gains: Optional[SteadyStateGains] = None,
    slack: float = 1e-9
) -> LyapunovDiagnostic:
    """检查 U_{k+1} - U_k <= -alpha3(z_k) + D_k + (b2 + b3) v2_k^2

    z_k = (||F_c||, ||x_tilde||), v1 = ||u*_{k+1} - u*_k||, v2 = ||w_{k+1} - w_k||。
    D_k = [f_{k+1}(u_{k+1}) - f_{k+1}(u*_{k+1}) - f_k(u_{k+1}) + f_k(u*_k)] / eta 是最优点移动
    造成的 V 变化; 二次代价下 D_k = (-2 (u_{k+1} - u*_k)^T N d_k + d_k^T N d_k) / eta,
    d_k = u*_{k+1} - u*_k。sigma = a2 v1^2 + (b2 + b3) v2^2 只覆盖其中的 d^T N d 项,
    交叉项没有固定符号, 所以 w 时变时 sigma 形式的不等式可能不成立; 结果中两者都保留。
    w 为常值时 D_k = 0, 两种形式一致。
    """
    eta = record.eta
    if eta <= 0:
        raise ContractViolation("Lyapunov 诊断需要正步长")
    if gains is None:
        gains = steady_state_gains(sys)
    G = _gain(G)
    H = _gain(H)
    P = certificate.P

    K = record.length
    values = np.empty(K)
    x_tilde = record.states - record.inputs @ gains.G_bar.T - record.disturbances @ gains.H_bar.T
    for k in range(K):
        V = cost.excess(record.inputs[k], G, H, record.disturbances[k]) / eta
        values[k] = V + float(x_tilde[k] @ P @ x_tilde[k])

    coefficient = certificate.alpha3_coefficient(eta)
    a2 = certificate.a2(eta)
    b23 = certificate.b2 + certificate.b3(eta)

    increments = np.diff(values)
    dissipation = np.empty(K - 1)
    sigma = np.empty(K - 1)
    drift = np.empty(K - 1)
    for k in range(K - 1):
        F = -(cost.grad_phi(record.inputs[k]) + G.T @ cost.grad_psi(record.outputs[k]))
        dissipation[k] = -coefficient * float(F @ F + x_tilde[k] @ x_tilde[k])
        u_next = record.inputs[k + 1]
        drift[k] = (cost.excess(u_next, G, H, record.disturbances[k + 1])
                    - cost.excess(u_next, G, H, record.disturbances[k])) / eta
        sigma[k] = a2 * record.norm_du_star[k] ** 2 + b23 * record.norm_dw[k] ** 2
    bounds = dissipation + drift + b23 * record.norm_dw[:K - 1] ** 2

    scale = slack * np.maximum(1.0, np.maximum(np.abs(values[:-1]), np.abs(values[1:])))
    decrease_ok = increments <= bounds + scale
    sigma_ok = increments <= dissipation + sigma + scale

    if not np.all(decrease_ok):
        logger.warning(
            "ISS 下降不等式未在所有步成立",
            LogCategory.CONTROL,
            {"violations": int(np.sum(~decrease_ok)), "steps": int(decrease_ok.size)}
        )
    return LyapunovDiagnostic(values=values, increments=increments, bounds=bounds, decrease_ok=decrease_ok,
                              dissipation=dissipation, sigma=sigma, drift=drift, sigma_ok=sigma_ok)


# ============ 假设检查 ============

@dataclass(frozen=True)
class PlLipschitzReport:
    """抽样检查 grad f 的 Lipschitz 性与 PL 不等式"""

    declared_lipschitz: float
    declared_pl: float
    lipschitz_margin: float
    pl_margin: float
    lipschitz_violations: int
    pl_violations: int
    samples: int

    @property
    def lipschitz_ok(self) -> bool:
        return self.lipschitz_violations == 0

    @property
    def pl_ok(self) -> bool:
        return self.pl_violations == 0


def _sample_ball(rng: np.random.Generator, center: np.ndarray, radius: float, count: int) -> np.ndarray:
    dim = center.shape[0]
    directions = rng.standard_normal((count, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=(count, 1)) ** (1.0 / dim)
    return center + radii * directions


def verify_pl_and_lipschitz(
    cost: CostModel,
    G,
    H,
    w,
    samples: int,
    radius: float,
    seed: int,
    declared_lipschitz: Optional[float] = None,
    declared_pl: Optional[float] = None
) -> PlLipschitzReport:
    """违反只报告不抛出; 裕量为所有样本中的最小值"""
    if samples < 2:
        raise ContractViolation(f"样本数至少为 2: {samples}")
    if radius <= 0:
        raise ContractViolation(f"采样半径必须为正: {radius}")
    ell = cost.composite_lipschitz(G) if declared_lipschitz is None else float(declared_lipschitz)
    mu = cost.pl_constant(G) if declared_pl is None else float(declared_pl)

    rng = np.random.default_rng(seed)
    u_star = optimizer(cost, G, H, w)
    f_star = cost.objective(u_star, G, H, w)
    first = _sample_ball(rng, u_star, radius, samples)
    second = _sample_ball(rng, u_star, radius, samples)

    lipschitz_margins = np.empty(samples)
    pl_margins = np.empty(samples)
    for i in range(samples):
        g1 = cost.gradient(first[i], G, H, w)
        g2 = cost.gradient(second[i], G, H, w)
        lipschitz_margins[i] = ell * np.linalg.norm(first[i] - second[i]) - np.linalg.norm(g1 - g2)
        pl_margins[i] = 0.5 * float(g1 @ g1) - mu * (cost.objective(first[i], G, H, w) - f_star)

    lipschitz_tolerance = 1e-10 * max(1.0, ell * radius)
    pl_tolerance = 1e-10 * max(1.0, (ell * radius) ** 2)
    return PlLipschitzReport(
        declared_lipschitz=ell,
        declared_pl=mu,
        lipschitz_margin=float(np.min(lipschitz_margins)),
        pl_margin=float(np.min(pl_margins)),
        lipschitz_violations=int(np.sum(lipschitz_margins < -lipschitz_tolerance)),
        pl_violations=int(np.sum(pl_margins < -pl_tolerance)),
        samples=samples,
    )
