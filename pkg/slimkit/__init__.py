"""Slim Fly topologies, layered multipath routing and cabling tools."""
