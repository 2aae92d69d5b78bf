"""Tests for slimkit.topology."""
