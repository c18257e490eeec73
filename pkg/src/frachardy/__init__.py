"""Numerical verification of sharp weighted fractional Hardy-type inequalities.

Modules
-------
special_fns   Gamma function, sphere areas, the angular kernel Phi, French powers.
constants     Sharp Hardy constants, remainder constants, derived exponents.
functions     Test-function families (bumps, minimizing sequences, counterexamples).
quadrature    Integration engines: 1-D adaptive, radial reduction, Monte Carlo.
verify        Pass/fail checks of the inequalities and parameter studies.
cli           Command-line front end with JSON/CSV reports.
"""

__version__ = "0.1.0"
