"""Tests for slimkit.cabling."""
