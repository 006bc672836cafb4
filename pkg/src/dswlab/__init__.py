"""Small-dispersion KdV near the leading edge of the dispersive shock.

Modules
-------
specfun       elliptic integrals, theta functions, Airy function
painleve2     Hastings-McLeod solution of Painleve II
initial_data  initial profiles, breakup point, Hopf solution
whitham       q-function, speeds, hodograph solve, edges
kdv           pseudospectral ETDRK4 reference solver
asymptotics   Hopf, elliptic, small-amplitude, multiscale, composite
compare       error measures, scaling fits, multiscale zone
cli           command-line entry point
"""

__version__ = "0.1.0"

from .initial_data import Sech2Model, breakup, hopf_solve, load_model  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = ["Sech2Model", "breakup", "hopf_solve", "load_model", "BACKEND", "__version__"]
