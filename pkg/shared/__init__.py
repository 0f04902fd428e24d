"""Shared types for CDANs: graphs, datasets, errors and file formats."""
