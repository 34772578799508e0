"""Numerical engine: geometry, spacing, constructions and incidence counting."""
