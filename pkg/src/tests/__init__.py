"""AFCM test suite."""
