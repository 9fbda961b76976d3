"""Integrity-issue and data-smell detectors."""
