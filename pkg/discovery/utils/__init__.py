"""Discovery utilities: phase timing and ordered worker pools."""
