"""Path-diversity and throughput analyses of routing layers."""
