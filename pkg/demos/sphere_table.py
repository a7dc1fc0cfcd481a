"""Sphere packing density bounds by dimension, with the best lattices beside them.

Each row solves the SDP for the best auxiliary function of degree d in the
chosen test basis, then hands the function to the independent verifier,
which only sees its coefficients.

Run with ``python3 demos/sphere_table.py [degree]``.
"""

import math
import sys

from packbound.cohn_elkies import sphere_bound
from packbound.verifier import SphereSystem, density_bound_from_f

LATTICES = {
    1: ("Z", 1.0),
    2: ("A2", math.pi / math.sqrt(12)),
    3: ("FCC", math.pi / math.sqrt(18)),
    4: ("D4", math.pi**2 / 16),
    8: ("E8", math.pi**4 / 384),
}

degree = int(sys.argv[1]) if len(sys.argv) > 1 else 12
print(f"degree {degree}")
print(" n     bound   verified   lattice")
for n in range(1, 9):
    bound, f, _ = sphere_bound(n, degree)
    checked = density_bound_from_f(f, SphereSystem(n))
    name, density = LATTICES.get(n, ("", float("nan")))
    lattice = f"{name} {density:.6f}" if name else ""
    print(f"{n:2d}  {bound:.6f}  {checked:.6f}   {lattice}")
