"""Topology builders, scalability tables and cost models."""
