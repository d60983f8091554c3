"""
共享测试夹具
"""

import pytest

from ssreg.core.config import reload_settings
from ssreg.lti import scalar_example_system


@pytest.fixture
def scalar_system():
    return scalar_example_system()


@pytest.fixture
def fresh_settings(monkeypatch):
    """在测试内修改 SSREG_* 环境变量, 结束后恢复全局配置"""
    yield monkeypatch
    monkeypatch.undo()
    reload_settings()
