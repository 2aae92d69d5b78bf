"""Tests for slimkit.routing."""
