"""Outcome labeling and the attribute/outcome alignment."""
