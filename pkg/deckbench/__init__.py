"""
deckbench - 图重构的覆盖数矩阵工作台

枚举同构类、计算 deck 与重构类、统计覆盖数，构造覆盖数矩阵并给出精确秩证书。
"""

__version__ = "0.1.0"
