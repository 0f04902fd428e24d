"""Output directory handling for the runner."""
