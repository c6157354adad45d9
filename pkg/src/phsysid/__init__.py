"""Structure-preserving identification of linear port-Hamiltonian systems."""

__version__ = "0.1.0"
