"""Mirror quantum 2-spheres, Podles spheres and Heegaard quantum 3-spheres.

Rewrite-system *-algebras, line-bundle idempotents over the mirror sphere,
and their index pairing computed exactly and through truncated operators.
"""

from .bundles import (
    build_idempotent,
    build_RL,
    gaussian_binomial,
    lens_idempotent,
    torus_freeness_witness,
    verify_idempotent,
)
from .chern import TraceFunctional, pairing, sign_witness, summability_report, tr_numeric
from .ncpoly import NcPoly, Params, Scalar
from .rewrite import (
    check_local_confluence,
    descend,
    heegaard_sphere,
    lift,
    mirror_sphere,
    podles_sphere,
    preset,
    quantum_torus,
    spectral_component,
)

__version__ = "0.1.0"
