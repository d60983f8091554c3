"""
试验任务队列

提供有界并发的试验执行功能, 结果按提交顺序返回
"""

import asyncio
import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

from .logger import LogCategory, logger


class TaskStatus(Enum):
    """任务状态"""
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class QueueTask:
    """队列任务"""
    index: int
    argument: Any
    status: TaskStatus = TaskStatus.PENDING
    started_at: Optional[float] = None
    completed_at: Optional[float] = None
    result: Any = None
    error: Optional[BaseException] = None


class TrialQueue:
    """试验队列: 同步函数在线程中执行, 并发数受信号量限制"""

    def __init__(self, max_workers: int = 1):
        self.max_workers = max(1, int(max_workers))
        self._stats = {
            "total_tasks": 0,
            "completed_tasks": 0,
            "failed_tasks": 0,
            "total_processing_time": 0.0
        }

    async def _execute_task(self, task: QueueTask, func: Callable[[Any], Any], semaphore: asyncio.Semaphore):
        """执行单个任务"""
        async with semaphore:
            task.status = TaskStatus.RUNNING
            task.started_at = time.perf_counter()
            try:
                task.result = await asyncio.to_thread(func, task.argument)
                task.status = TaskStatus.COMPLETED
                self._stats["completed_tasks"] += 1
            except Exception as e:
                task.error = e
                task.status = TaskStatus.FAILED
                self._stats["failed_tasks"] += 1
            finally:
                task.completed_at = time.perf_counter()
                self._stats["total_processing_time"] += task.completed_at - task.started_at

    async def run_all(self, func: Callable[[Any], Any], arguments: Sequence[Any]) -> List[Any]:
        """并发执行全部任务, 按提交顺序返回结果; 任一任务失败则抛出其异常"""
        tasks = [QueueTask(index=i, argument=arg) for i, arg in enumerate(arguments)]
        self._stats["total_tasks"] += len(tasks)
        semaphore = asyncio.Semaphore(self.max_workers)
        await asyncio.gather(*(self._execute_task(task, func, semaphore) for task in tasks))

        failed = [task for task in tasks if task.status == TaskStatus.FAILED]
        if failed:
            first = min(failed, key=lambda t: t.index)
            logger.error(
                f"{len(failed)} 个任务失败, 首个失败任务序号 {first.index}",
                LogCategory.HARNESS,
                {"failed": [t.index for t in failed]}
            )
            raise first.error
        return [task.result for task in tasks]

    def run(self, func: Callable[[Any], Any], arguments: Sequence[Any]) -> List[Any]:
        """同步入口"""
        if self.max_workers == 1:
            # 单线程时直接顺序执行, 避免事件循环开销
            results = []
            for argument in arguments:
                started = time.perf_counter()
                self._stats["total_tasks"] += 1
                results.append(func(argument))
                self._stats["completed_tasks"] += 1
                self._stats["total_processing_time"] += time.perf_counter() - started
            return results
        return asyncio.run(self.run_all(func, arguments))

    def get_queue_stats(self) -> Dict[str, Any]:
        """获取队列统计信息"""
        completed = self._stats["completed_tasks"]
        return {
            **self._stats,
            "max_workers": self.max_workers,
            "average_processing_time": self._stats["total_processing_time"] / completed if completed else 0.0
        }
