"""
随机种子派生

每个试验的种子由 (主种子, 试验序号) 经 SeedSequence 派生, 与执行顺序无关
"""

import numpy as np


def derive_seed(master_seed: int, index: int, stream: int = 0) -> int:
    """派生第 index 个试验的整数种子; stream 区分同一试验内的不同随机源"""
    sequence = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFF, int(index), int(stream)])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])
