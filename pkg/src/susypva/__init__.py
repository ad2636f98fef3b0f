"""Exact symbolic engine for SUSY Poisson vertex algebras."""
