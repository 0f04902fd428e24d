"""Synthetic benchmark generator and edge-level evaluation."""
