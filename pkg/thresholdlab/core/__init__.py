"""Shared plumbing: configuration, logging, errors, events and data types."""
