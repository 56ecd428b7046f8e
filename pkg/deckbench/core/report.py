"""
报告生成

JSON（默认）、CSV（只用于矩阵）和带行列标签的文本矩阵。
所有输出都是确定的：同样的输入得到逐字节相同的报告。
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from .errors import Verdict
from .linalg import ExactMatrix


class ReportGenerator:
    """报告生成器"""

    @staticmethod
    def to_json(obj: Any) -> str:
        return json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=True)

    @staticmethod
    def _frame(m: ExactMatrix) -> pd.DataFrame:
        frame = pd.DataFrame(
            [list(row) for row in m.entries],
            index=list(m.row_labels),
            columns=list(m.col_labels),
            dtype=object,
        )
        frame.index.name = "sequence"
        return frame

    @staticmethod
    def matrix_to_csv(m: ExactMatrix) -> str:
        """表头为列标签，第 0 列为序列的规范标签"""
        return ReportGenerator._frame(m).to_csv(lineterminator="\n")

    @staticmethod
    def matrix_to_text(m: ExactMatrix, title: Optional[str] = None) -> str:
        lines = []
        if title:
            lines.append("=" * 70)
            lines.append(f"[*] {title}")
            lines.append("=" * 70)
        lines.append(f"[-] 维度: {m.rows} x {m.cols}")
        if m.rows and m.cols:
            lines.append(ReportGenerator._frame(m).to_string())
        return "\n".join(lines)

    @staticmethod
    def verdicts_to_text(verdicts: List[Verdict]) -> str:
        lines = []
        for verdict in verdicts:
            lines.append(f"[{'+' if verdict.passed and not verdict.vacuous else '!'}] {verdict}")
            for violation in verdict.violations[:10]:
                lines.append(f"    [-] {violation}")
            if len(verdict.violations) > 10:
                lines.append(f"    ... 还有 {len(verdict.violations) - 10} 条")
        return "\n".join(lines)

    @staticmethod
    def mapping_to_text(data: Dict[str, Any]) -> str:
        return "\n".join(f"{key}: {value}" for key, value in data.items())

    @staticmethod
    def write(text: str, path: Optional[str]) -> None:
        """写入文件（自动创建父目录）；path 为空时写 stdout"""
        if not text.endswith("\n"):
            text += "\n"
        if path:
            output_path = Path(path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            with open(output_path, "w", encoding="utf-8") as f:
                f.write(text)
        else:
            print(text, end="")
