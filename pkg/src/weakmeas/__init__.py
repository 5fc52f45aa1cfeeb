"""All-order weak measurement with post-selection for observables satisfying A**2 = 1."""
__version__ = "0.1.0"
