"""
错误类型与校验结果

所有库函数只负责抛出异常；退出码的映射统一在 main.py 中完成。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List


class WorkbenchError(Exception):
    """deckbench 所有可预期错误的基类"""

    exit_code: int = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": {k: str(v) for k, v in self.details.items()},
        }


class GraphFormatError(WorkbenchError, ValueError):
    """graph6/digraph6 格式错误，或邻接矩阵不合法（自环、无向图不对称等）"""
    exit_code = 4


class KindMismatchError(WorkbenchError, ValueError):
    """有向图与无向图混用"""
    exit_code = 2


class ConfigError(WorkbenchError, ValueError):
    """参数组合不合法，message 中给出出错的参数名"""
    exit_code = 2


class PreconditionError(WorkbenchError, ValueError):
    """操作的前置条件不成立（如 kelly_check 的两张 deck 不相同）"""
    exit_code = 2


class BudgetExceededError(WorkbenchError):
    """规模超出穷举预算（或缺少 --slow）"""
    exit_code = 5


class OrderViolationError(WorkbenchError):
    """构造 K 时 card 嵌入偏序出现环"""
    exit_code = 6


@dataclass
class Verdict:
    """一次校验的结果（对应 ToolResult 的角色）"""
    name: str
    passed: bool = True
    cases: int = 0
    violations: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def record(self, ok: bool, **violation: Any) -> None:
        self.cases += 1
        if not ok:
            self.passed = False
            self.violations.append(violation)

    @property
    def vacuous(self) -> bool:
        return self.cases == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed and not self.vacuous,
            "cases": self.cases,
            "violations": self.violations,
            "details": self.details,
        }

    def __str__(self):
        if self.vacuous:
            return f"ERROR: {self.name} checked no cases"
        if not self.passed:
            return f"ERROR: {self.name} failed {len(self.violations)}/{self.cases}"
        return f"OK {self.name} ({self.cases} cases)"
