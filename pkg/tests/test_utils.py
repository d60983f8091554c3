import importlib
import json
import logging
import time

import pytest

from ssreg.utils.logger import LogCategory, StructuredLogger
from ssreg.utils.task_queue import TrialQueue


class _Collector(logging.Handler):
    def __init__(self):
        super().__init__()
        self.messages = []

    def emit(self, record):
        self.messages.append(record.payload)


def test_queue_keeps_submission_order():
    def slow_square(x):
        time.sleep(0.001 * (5 - x))
        return x * x

    queue = TrialQueue(max_workers=3)
    assert queue.run(slow_square, range(5)) == [0, 1, 4, 9, 16]
    stats = queue.get_queue_stats()
    assert stats["completed_tasks"] == 5
    assert stats["max_workers"] == 3


def test_queue_serial_and_parallel_agree():
    assert TrialQueue(1).run(str, [3, 1, 2]) == TrialQueue(4).run(str, [3, 1, 2])


def test_queue_reraises_first_failure():
    def fail_on_odd(x):
        if x % 2:
            raise ValueError(f"bad {x}")
        return x

    with pytest.raises(ValueError, match="bad 1"):
        TrialQueue(2).run(fail_on_odd, range(4))


def test_structured_records_carry_category_and_data():
    log = StructuredLogger("ssreg.test")
    collector = _Collector()
    log.logger.addHandler(collector)
    log.set_context("identify")
    log.warning("窗口被跳过", LogCategory.IDENTIFY, {"skipped": 2})
    log.log_performance_metric("identify_duration", 0.5, "seconds")

    first, second = collector.messages
    assert first["level"] == "WARNING"
    assert first["category"] == "identify"
    assert first["context"] == {"command": "identify"}
    assert first["data"] == {"skipped": 2}
    assert second["category"] == "performance"
    assert second["data"]["unit"] == "seconds"


def test_json_formatter_renders_numpy_values():
    import numpy as np

    from ssreg.utils.logger import RecordFormatter

    record = logging.LogRecord("ssreg", logging.INFO, __file__, 1, "msg", None, None)
    record.payload = {"timestamp": "t", "level": "INFO", "category": "lti", "message": "msg",
                      "data": {"rank": np.int64(3), "values": np.array([1.0, 2.0])}}
    assert json.loads(RecordFormatter("json").format(record))["data"] == {"rank": 3, "values": [1.0, 2.0]}
    assert RecordFormatter("text").format(record).startswith("[INFO] t [lti] msg | ")


@pytest.mark.parametrize("package", ["ssreg", "ssreg.utils", "ssreg.core", "ssreg.dao",
                                     "ssreg.services", "ssreg.middleware", "ssreg.api"])
def test_package_exports_resolve(package):
    module = importlib.import_module(package)
    for name in getattr(module, "__all__", []):
        assert hasattr(module, name), f"{package}.{name}"
