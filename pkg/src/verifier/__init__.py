"""
Numerical verification of the critical-constant counterexample for strong
unique continuation of the two-dimensional Dirac operator, with the
Dirac-Kelvin transform that moves it to the point at infinity.
"""

__version__ = "0.1.0"
