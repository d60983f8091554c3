"""
统一异常处理系统

定义所有业务异常、错误码和 CLI 退出码
"""

from typing import Any, Optional


class ErrorCodes:
    """标准错误代码"""

    # 契约与配置错误 (1000-1999)
    CONTRACT_VIOLATION = "E1001"
    DIMENSION_MISMATCH = "E1002"
    INSUFFICIENT_DATA = "E1003"
    CONFIGURATION_ERROR = "E1004"
    INVALID_FILE = "E1005"

    # 模型相关错误 (2000-2999)
    ILL_CONDITIONED_SYSTEM = "E2001"
    NO_LYAPUNOV_SOLUTION = "E2002"
    NUMERICAL_OVERFLOW = "E2003"
    GENERATION_FAILURE = "E2004"
    LYAPUNOV_RESIDUAL = "E2005"

    # 辨识相关错误 (3000-3999)
    DATA_NOT_EXCITING = "E3001"
    DATA_INCONSISTENT = "E3002"

    # 控制相关错误 (4000-4999)
    CERTIFICATE_CONDITION = "E4001"
    DIVERGENCE = "E4002"


class ExitCodes:
    """CLI 退出码"""

    SUCCESS = 0
    UNEXPECTED = 1
    CONFIG_ERROR = 2
    DIVERGENCE = 3
    ESTIMATOR_FAILURE = 4


class SsregException(Exception):
    """ssreg 自定义异常基类"""

    exit_code: int = ExitCodes.UNEXPECTED

    def __init__(
        self,
        message: str,
        code: str,
        data: Optional[Any] = None,
        exit_code: Optional[int] = None
    ):
        self.message = message
        self.code = code
        self.data = data
        if exit_code is not None:
            self.exit_code = exit_code
        super().__init__(message)


class ContractViolation(SsregException, ValueError):
    """前置条件或维度契约被违反"""

    exit_code = ExitCodes.CONFIG_ERROR

    def __init__(self, message: str, code: str = ErrorCodes.CONTRACT_VIOLATION, data: Optional[Any] = None):
        super().__init__(message=message, code=code, data=data)


class InsufficientDataError(ContractViolation):
    """数据长度不足"""

    def __init__(self, message: str, data: Optional[Any] = None):
        super().__init__(message, ErrorCodes.INSUFFICIENT_DATA, data)


class ConfigException(SsregException):
    """配置异常"""

    exit_code = ExitCodes.CONFIG_ERROR

    def __init__(self, message: str, data: Optional[Any] = None):
        super().__init__(message=message, code=ErrorCodes.CONFIGURATION_ERROR, data=data)


class ModelException(SsregException):
    """系统模型异常 (病态、无解、溢出、生成失败)"""

    exit_code = ExitCodes.CONFIG_ERROR

    def __init__(self, message: str, code: str, data: Optional[Any] = None):
        super().__init__(message=message, code=code, data=data)


class EstimatorException(SsregException):
    """增益辨识失败"""

    exit_code = ExitCodes.ESTIMATOR_FAILURE

    def __init__(self, message: str, code: str, data: Optional[Any] = None):
        super().__init__(message=message, code=code, data=data)


class CertificateConditionError(ContractViolation):
    """步长证书条件不满足"""

    def __init__(self, message: str, data: Optional[Any] = None):
        super().__init__(message, ErrorCodes.CERTIFICATE_CONDITION, data)


class DivergenceException(SsregException):
    """闭环发散"""

    exit_code = ExitCodes.DIVERGENCE

    def __init__(self, message: str, step: int, data: Optional[Any] = None):
        self.step = step
        super().__init__(message=message, code=ErrorCodes.DIVERGENCE, data=data)


# 便捷异常创建函数
def dimension_mismatch(what: str, expected: Any = None, got: Any = None) -> ContractViolation:
    """维度不匹配异常"""
    if expected is not None:
        message = f"维度不匹配: {what} (期望 {expected}, 实际 {got})"
    else:
        message = f"维度不匹配: {what}"
    return ContractViolation(message, ErrorCodes.DIMENSION_MISMATCH, {"expected": expected, "got": got})


def insufficient_data(required: int, available: int, what: str = "信号") -> InsufficientDataError:
    """数据不足异常"""
    return InsufficientDataError(
        f"{what}长度不足: 至少需要 {required} 个样本, 实际 {available}",
        {"required": required, "available": available}
    )


def ill_conditioned_system(condition: float) -> ModelException:
    """I-A 病态异常"""
    return ModelException(
        f"I-A 数值奇异 (条件数 {condition:.3e})",
        ErrorCodes.ILL_CONDITIONED_SYSTEM,
        {"condition": condition}
    )


def no_lyapunov_solution(spectral_radius: float) -> ModelException:
    """Lyapunov 方程无解异常"""
    return ModelException(
        f"A 不是 Schur 稳定的 (谱半径 {spectral_radius:.6g}), Lyapunov 方程无正定解",
        ErrorCodes.NO_LYAPUNOV_SOLUTION,
        {"spectral_radius": spectral_radius}
    )


def lyapunov_residual(residual: float, tolerance: float) -> ModelException:
    """Lyapunov 解的残差超出容差"""
    return ModelException(
        f"Lyapunov 方程残差 {residual:.3e} 超出容差 {tolerance:.3e}",
        ErrorCodes.LYAPUNOV_RESIDUAL,
        {"residual": residual, "tolerance": tolerance}
    )


def numerical_overflow(step: int) -> ModelException:
    """数值溢出异常"""
    return ModelException(f"仿真在第 {step} 步出现数值溢出", ErrorCodes.NUMERICAL_OVERFLOW, {"step": step})


def generation_failure(what: str, attempts: int) -> ModelException:
    """随机生成失败异常"""
    return ModelException(
        f"{what}生成失败: {attempts} 次采样均被拒绝",
        ErrorCodes.GENERATION_FAILURE,
        {"attempts": attempts}
    )


def data_not_exciting(residual: float) -> EstimatorException:
    """数据激励不足异常"""
    return EstimatorException(
        f"数据激励不足: ||U M - I|| = {residual:.3e}",
        ErrorCodes.DATA_NOT_EXCITING,
        {"residual_identity": residual}
    )


def data_inconsistent(residual: float) -> EstimatorException:
    """数据与无噪声 LTI 模型不一致异常"""
    return EstimatorException(
        f"数据与无噪声 LTI 系统不一致: ||Y_diff M|| = {residual:.3e}",
        ErrorCodes.DATA_INCONSISTENT,
        {"residual_equality": residual}
    )
