"""Tests for slimkit."""
