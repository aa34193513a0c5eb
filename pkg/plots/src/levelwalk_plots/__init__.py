"""Batch figure rendering for levelwalk CSV outputs."""

__all__ = ["schemas", "aggregate", "render"]
