"""
deckbench 配置文件

优先级：命令行参数 > 环境变量 > deckbench.yaml > 代码默认值
"""

import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import psutil
import yaml

from .core.logger import logger

DEFAULT_SEED = 20240601
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))
DEFAULT_CONFIG_PATH = os.path.join(PROJECT_ROOT, "deckbench.yaml")

COMMANDS = (
    "enum", "decks", "census", "count", "matrix", "rank",
    "certify", "verify", "legit-deck",
)
COUNT_ACTIONS = ("s", "c", "cstar", "kocay-sum")
VERIFY_ACTIONS = ("eq1", "recurrence", "theorem1", "theorem2", "kelly")
NEEDS_N = ("enum", "census", "matrix", "rank", "certify")
FORMATS = ("json", "csv", "text")
PREDICATES = ("all", "connected", "oriented")
KINDS = ("graph", "digraph")


def load_yaml_config(path: Optional[str] = None) -> Dict[str, Any]:
    """加载 YAML 配置，失败时返回空字典"""
    path = path or os.environ.get("DECKBENCH_CONFIG") or DEFAULT_CONFIG_PATH
    try:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as f:
                return yaml.safe_load(f) or {}
    except Exception as e:
        logger.warn(f"加载配置失败: {path}", error=str(e))
    return {}


yaml_config = load_yaml_config()


def reload_yaml_config(path: Optional[str]) -> None:
    """--config 指定的文件替换默认配置（在构造 RunConfig 之前调用）"""
    global yaml_config
    yaml_config = load_yaml_config(path)


def default_table_mb() -> int:
    """cover 计数置换表的内存上限 (MB)：环境变量优先，否则取可用内存的 10%，最多 256"""
    env = os.environ.get("DECKBENCH_TABLE_MB")
    if env:
        try:
            return max(0, int(env))
        except ValueError:
            logger.warn("DECKBENCH_TABLE_MB 不是整数，已忽略", value=env)
    if "table_mb" in yaml_config:
        return int(yaml_config["table_mb"])
    available = psutil.virtual_memory().available // (1024 * 1024)
    return int(min(256, available // 10))


def default_seed() -> int:
    env = os.environ.get("DECKBENCH_SEED")
    if env and env.lstrip("-").isdigit():
        return int(env)
    return int(yaml_config.get("seed", DEFAULT_SEED))


@dataclass
class RunConfig:
    """一次 CLI 运行的配置"""

    command: str = "census"
    action: Optional[str] = None
    kind: str = field(default_factory=lambda: yaml_config.get("kind", "graph"))
    n: Optional[int] = None
    predicate: str = field(default_factory=lambda: yaml_config.get("predicate", "all"))
    family_path: Optional[str] = None
    sequence: Optional[str] = None
    graphs: List[str] = field(default_factory=list)
    output_format: str = field(default_factory=lambda: yaml_config.get("format", "json"))
    output: Optional[str] = None
    seed: int = field(default_factory=default_seed)
    jobs: int = field(default_factory=lambda: int(yaml_config.get("jobs", 1)))
    slow: bool = False
    trials: int = field(default_factory=lambda: int(yaml_config.get("trials", 100)))
    exhaustive: bool = False
    timings: bool = False
    verbose: bool = False
    config_path: Optional[str] = None
    search_max_length: int = field(default_factory=lambda: int(yaml_config.get("search_max_length", 3)))
    search_max_candidates: int = field(
        default_factory=lambda: int(yaml_config.get("search_max_candidates", 2000)))
    theorem_family_cap: int = field(default_factory=lambda: int(yaml_config.get("theorem_family_cap", 400)))
    table_mb: int = field(default_factory=default_table_mb)

    def validate(self) -> List[str]:
        errors = []
        if self.command not in COMMANDS:
            errors.append(f"未知命令: {self.command}")
        if self.command == "count" and self.action not in COUNT_ACTIONS:
            errors.append(f"count 子命令必须是 {COUNT_ACTIONS} 之一 (收到 {self.action})")
        if self.command == "verify" and self.action not in VERIFY_ACTIONS:
            errors.append(f"verify 子命令必须是 {VERIFY_ACTIONS} 之一 (收到 {self.action})")
        if self.kind not in KINDS:
            errors.append(f"--kind 必须是 {KINDS} 之一")
        if self.predicate not in PREDICATES:
            errors.append(f"--predicate 必须是 {PREDICATES} 之一")
        elif self.predicate == "oriented" and self.kind != "digraph":
            errors.append("--predicate oriented 只适用于 --kind digraph")
        if self.output_format not in FORMATS:
            errors.append(f"--format 必须是 {FORMATS} 之一")
        if self.output_format == "csv" and self.command not in ("matrix", "certify"):
            errors.append("--format csv 只用于 matrix / certify")
        if self.jobs < 1:
            errors.append("--jobs 必须 >= 1")
        if self.trials < 0:
            errors.append("--trials 不能为负")
        if self.n is not None and self.n < 0:
            errors.append("--n 不能为负")
        if self.n is None and self.command in NEEDS_N:
            errors.append(f"{self.command} 需要 --n")
        if self.n is None and self.command == "decks" and not self.graphs:
            errors.append("decks 需要 --n 或图参数")
        if self.n is None and self.command == "verify" and self.action in ("theorem1", "theorem2", "kelly"):
            errors.append(f"verify {self.action} 需要 --n")
        if self.command == "count" and self.action == "s" and len(self.graphs) != 2:
            errors.append("count s 需要两个图参数: H G")
        if self.command == "count" and self.action in ("c", "cstar", "kocay-sum"):
            if len(self.graphs) != 1:
                errors.append(f"count {self.action} 需要一个宿主图参数 G")
            if not self.sequence and not self.family_path:
                errors.append(f"count {self.action} 需要 --sequence 或 --family")
        if self.command == "legit-deck" and not self.graphs:
            errors.append("legit-deck 需要卡片参数")
        if self.search_max_length < 2:
            errors.append("search_max_length 必须 >= 2")
        return errors
