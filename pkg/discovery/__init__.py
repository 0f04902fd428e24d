"""CDANs discovery: CI tests, lagged parents, skeleton, orientation, pipeline."""
