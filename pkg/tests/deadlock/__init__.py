"""Tests for slimkit.deadlock."""
