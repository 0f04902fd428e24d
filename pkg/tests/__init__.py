"""Test suite for CDANs."""
