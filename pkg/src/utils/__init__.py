"""Utility modules."""

__all__ = ["storage", "logging_config", "dot", "svg"]
