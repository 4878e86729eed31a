"""Heisenberg Fock module and torus trace identities."""
