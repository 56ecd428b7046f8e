"""
pytest 公共配置

- slow 标记：较重的穷举网格，可用 -m "not slow" 跳过
- hypothesis 使用固定的 derandomize profile，保证属性测试可复现
"""

import pytest
from hypothesis import HealthCheck, settings

from deckbench.core.covers import configure_table
from deckbench.core.logger import logger

settings.register_profile(
    "deckbench",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deckbench")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 较重的穷举网格校验")


@pytest.fixture(autouse=True)
def quiet_logger():
    """每个测试前后恢复日志状态"""
    logger.verbose = False
    logger.clear_history()
    yield
    logger.verbose = False


@pytest.fixture
def no_table():
    """关闭 cover_count 置换表，结束后恢复默认"""
    configure_table(0)
    yield
    configure_table(64)
