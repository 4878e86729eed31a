"""Exact q- and z-expansions of Eisenstein and Weierstrass type functions."""
