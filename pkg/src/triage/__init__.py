"""Ticket ingestion and triage statistics."""
