"""Shared numeric constants."""

# Entry-wise tolerance used for normalization, unitarity and equality checks.
TOL = 1e-10

# Norm deviations above this are treated as malformed input, not drift.
NORMALIZE_LIMIT = 1e-6
