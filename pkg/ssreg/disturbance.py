"""
扰动信号库
"""

from typing import Optional

import numpy as np

from .core.exceptions import ContractViolation, dimension_mismatch
from .core.models import DisturbanceKind, DisturbanceSpec, StdSchedule


def _offset(spec: DisturbanceSpec, r: int) -> np.ndarray:
    value = np.asarray(spec.value, dtype=float).reshape(-1)
    if value.size == 1:
        return np.full(r, float(value[0]))
    if value.size != r:
        raise dimension_mismatch("扰动常值分量维数", r, value.size)
    return value


def std_profile(spec: DisturbanceSpec, length: int) -> np.ndarray:
    """每一步的高斯标准差"""
    if spec.schedule == StdSchedule.GEOMETRIC_DECAY:
        return spec.std * spec.decay_rate ** np.arange(length)
    return np.full(length, spec.std)


def _sinusoid(spec: DisturbanceSpec, length: int, r: int) -> np.ndarray:
    wave = spec.amplitude * np.sin(2.0 * np.pi * np.arange(length) / spec.period)
    return np.repeat(wave[:, None], r, axis=1)


def _random_walk(rng: np.random.Generator, spec: DisturbanceSpec, length: int, r: int) -> np.ndarray:
    steps = spec.step_std * rng.standard_normal((length, r))
    steps[0] = 0.0
    return np.cumsum(steps, axis=0)


def make_disturbance(spec: DisturbanceSpec, length: int, r: int, seed: Optional[int] = None) -> np.ndarray:
    """返回 (length, r) 的扰动序列; 给定种子时结果确定, seed 参数覆盖 spec.seed"""
    if length < 1:
        raise ContractViolation(f"扰动序列长度必须为正: {length}")
    if r < 1:
        raise ContractViolation(f"扰动维数必须为正: {r}")
    rng = np.random.default_rng(spec.seed if seed is None else seed)

    if spec.kind == DisturbanceKind.ZERO:
        return np.zeros((length, r))

    signal = np.tile(_offset(spec, r), (length, 1))
    if spec.kind == DisturbanceKind.IID_GAUSSIAN:
        signal += std_profile(spec, length)[:, None] * rng.standard_normal((length, r))
    elif spec.kind == DisturbanceKind.SINUSOID:
        signal += _sinusoid(spec, length, r)
    elif spec.kind == DisturbanceKind.RANDOM_WALK:
        signal += _random_walk(rng, spec, length, r)
    elif spec.kind == DisturbanceKind.SINUSOID_WALK:
        signal += _sinusoid(spec, length, r) + _random_walk(rng, spec, length, r)
    return signal
