"""Rack layout, wiring plans and discovery-dump verification."""
