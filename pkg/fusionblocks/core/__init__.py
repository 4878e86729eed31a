"""Fusion rings, stable graphs and block ranks."""
