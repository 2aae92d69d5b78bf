"""Tests for slimkit.analysis."""
