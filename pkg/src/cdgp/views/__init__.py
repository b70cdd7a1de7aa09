"""Shared views for the cdgp app."""

from .common import hyperparams_table, metrics_table

__all__ = ["hyperparams_table", "metrics_table"]
