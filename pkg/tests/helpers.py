"""
测试用系统构造
"""

import numpy as np
import scipy.linalg as spla

from ssreg.lti import LtiSystem, steady_state_gains


def well_conditioned_system(n: int, m: int, r: int, seed: int) -> LtiSystem:
    """对称 A (谱半径 0.5), 正交 C, ||Gbar|| = ||Hbar|| = 0.5

    步长证书在这类系统上不会过于保守, 闭环能在 10^4 步内收敛
    """
    rng = np.random.default_rng(seed)
    U, _ = spla.qr(rng.standard_normal((n, n)))
    eigenvalues = rng.uniform(-0.5, 0.5, size=n)
    eigenvalues[0] = 0.5
    A = U @ np.diag(eigenvalues) @ U.T
    A = 0.5 * (A + A.T)
    C, _ = spla.qr(rng.standard_normal((n, n)))
    B = rng.standard_normal((n, m))
    E = rng.standard_normal((n, r))

    gains = steady_state_gains(LtiSystem(A=A, B=B, C=C, E=E))
    B = B * (0.5 / np.linalg.norm(gains.G_bar, 2))
    E = E * (0.5 / np.linalg.norm(gains.H_bar, 2))
    return LtiSystem(A=A, B=B, C=C, E=E).require_admissible()
