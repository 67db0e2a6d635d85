"""Numerical tolerance constants shared by the library, its tests and the selftest.

Property tests and acceptance checks must use the same numbers the library
itself promises, so they live in one place.
"""

# Relative tolerance for algebraic identities (inverse pair, duality product).
IDENTITY_RTOL = 1e-12

# Slack for difference-quotient convexity/concavity checks.
CONVEXITY_TOL = 1e-9

# Relative tolerance for the finite-difference vs quadrature derivative identities.
DERIVATIVE_RTOL = 1e-6

# Quadrature error targets (absolute / relative).
QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
# Achieved-error threshold above which quadrature reports failure instead of
# returning a degraded value.
QUAD_ACCEPT_RTOL = 1e-8

# invert_theta stops when |theta(a) - target| <= INVERT_THETA_RTOL * (1 + target).
INVERT_THETA_RTOL = 1e-10

# Golden-section refinement of the rate-function optimizer stops at this
# relative bracket width in a.
OPTIMIZER_A_RTOL = 1e-8

# Numeric rate values match closed forms at least this tightly (absolute).
CLOSED_FORM_ATOL = 1e-5
