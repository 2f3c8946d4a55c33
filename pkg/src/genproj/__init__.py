"""Metric and generalized projection operators in finite-dimensional l^p spaces.

Library layout:

- space: l^p norms, duality mappings, modulus estimates
- lyapunov: the distance-like functionals v1..v4 and their bounds
- sets: convex set primitives with exact Euclidean oracles
- projections: the three projection operators and their residuals
- solvers: feasibility, variational-inequality and Wiener-Hopf iterations
- verify: the numerical inequality / operator-property check suite
- cli: command-line front end (``genproj run`` / ``genproj compare``)

Hot kernels run in a compiled extension when available; set
GENPROJ_BACKEND=python to force the pure-numpy fallback.
"""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
