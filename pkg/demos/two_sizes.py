"""Checking a certificate for packings of balls of two sizes.

Given a matrix-valued radial function, the verifier checks separation for
every pair of sizes, the volume condition on fhat(0), and positivity of
fhat on a grid. A rank-one combination of a single-size certificate passes
for two equal sizes; shrinking one of the balls breaks separation for the
pairs involving it, and the verifier says which.

Run with ``python3 demos/two_sizes.py``.
"""

import numpy as np

from packbound.cohn_elkies import sphere_bound
from packbound.verifier import MatrixRadialFunction, SphereSystem, verify_conditions

n = 3
_, g, _ = sphere_bound(n, 10)
for radii, weights in [((1.0, 1.0), (1.0, 1.0)), ((1.0, 0.5), (1.0, 0.5))]:
    v = np.array(weights)
    f = MatrixRadialFunction(n, np.einsum("i,j,k->ijk", v, v, np.array(g.a)))
    rep = verify_conditions(f, SphereSystem(n, list(radii)))
    print(f"radii {radii}: certified {rep.certified}")
    for (i, j), margin in rep.pair_separation.items():
        print(f"  max f_{i}{j}(r) beyond r_{i} + r_{j}: {margin:+.2e}")
    print(f"  volume margin {rep.volume_margin:+.2e}, positivity margin {rep.positivity_margin:+.2e}")
