"""Maker-side strategies and a name registry."""

from __future__ import annotations

from .common import BaseStrategy, InvariantLog
from .ham import HamStrategy
from .pk import PkStrategy
from .pm import PmStrategy
from .red import RedStrategy
from .sk import SkStrategy

MAKERS = {
    "pm": PmStrategy,
    "pm_bipartite": lambda: PmStrategy(variant="bipartite"),
    "ham": HamStrategy,
    "red": RedStrategy,
    "pkf": PkStrategy,
    "skf": SkStrategy,
}

DEFAULT_MAKER = {"pm": "pm", "ham": "ham", "pkf": "pkf", "skf": "skf"}


def make_maker(name: str) -> BaseStrategy:
    if name == "first":
        from ..breakers import FirstFreeStrategy

        return FirstFreeStrategy()
    try:
        return MAKERS[name]()
    except KeyError:
        raise ValueError(f"unknown maker strategy {name!r}; choose from {sorted(MAKERS) + ['first']}") from None


__all__ = [
    "BaseStrategy",
    "InvariantLog",
    "PmStrategy",
    "HamStrategy",
    "RedStrategy",
    "PkStrategy",
    "SkStrategy",
    "MAKERS",
    "make_maker",
]
