"""Core mathematical components."""

__all__ = [
    "config",
    "errors",
    "cyclic_order",
    "colored_trees",
    "dendrites",
    "replacement",
    "laminations",
    "julia",
    "verification",
]
