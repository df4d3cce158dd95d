"""Experiment orchestration and result emission."""
