"""Exact variational bicomplex engine for Lorentzian metrics."""
