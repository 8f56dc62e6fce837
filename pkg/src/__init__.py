from .vector_packing import (
    BenchHarness,
    FirstFit,
    Settings,
    Vec2,
    exact_opt,
    run_online,
)

__all__ = [
    "BenchHarness",
    "FirstFit",
    "Settings",
    "Vec2",
    "exact_opt",
    "run_online",
]
