"""Shared primitives: errors, seeded streams, point processes and numerics."""
