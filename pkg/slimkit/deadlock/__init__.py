"""Deadlock analysis and virtual-lane assignment."""
