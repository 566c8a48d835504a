"""Heterogeneous ALU simulator: ADD routing across mixed-width ripple-carry adders."""
__version__ = "0.1.0"
