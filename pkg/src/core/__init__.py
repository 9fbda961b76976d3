"""Errors, engine settings and label vocabularies shared by every package."""
