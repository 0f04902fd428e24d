"""Command-line runner for simulation, discovery and evaluation."""
