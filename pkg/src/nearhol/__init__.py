"""Exact and numerical tools for nearly holomorphic sections on compact Hermitian symmetric spaces."""
