"""
Executor - 并行执行器

fork-join 方式执行纯函数任务。结果始终按提交顺序返回，
因此输出与 jobs 数无关。
"""

import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from .logger import logger

T = TypeVar("T")
R = TypeVar("R")


def chunked(items: Sequence[T], size: int) -> List[List[T]]:
    """按固定大小切分任务列表"""
    size = max(1, size)
    return [list(items[i:i + size]) for i in range(0, len(items), size)]


def _progress(results: Iterable[R], total: int, desc: Optional[str]) -> Iterable[R]:
    if desc and logger.verbose:
        return tqdm(results, total=total, desc=desc, file=sys.stderr, leave=False)
    return results


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1,
                 desc: Optional[str] = None) -> List[R]:
    """
    有序并行 map

    Args:
        fn: 模块级纯函数（需可 pickle）
        items: 任务参数
        jobs: 进程数，<= 1 时在当前进程内顺序执行
        desc: 进度条标题；仅 verbose 时显示（stderr）

    Returns:
        与 items 顺序一致的结果列表
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return list(_progress((fn(item) for item in items), len(items), desc))

    workers = min(jobs, len(items))
    logger.debug("并行执行", tasks=len(items), workers=workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(_progress(executor.map(fn, items), len(items), desc))
