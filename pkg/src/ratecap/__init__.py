"""Planning and simulation for a supplier of rate-constrained energy services."""

__version__ = "0.1.0"
