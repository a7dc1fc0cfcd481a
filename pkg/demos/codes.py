"""Delsarte's LP bound for binary codes next to the true code sizes.

A binary code of length m and minimum distance d is an independent set in
the Cayley graph of Z_2^m whose generators are the words of weight below
d. Collapsing the Fourier LP by Hamming weight leaves m + 1 variables, so
lengths far beyond brute force are cheap.

Run with ``python3 demos/codes.py``.
"""

from packbound.cayley import delsarte_bound

# largest known binary codes A(m, d), for comparison
KNOWN = {(5, 3): 4, (7, 3): 16, (8, 4): 16, (10, 4): 40, (12, 4): 144, (16, 6): 256}

print(" m  d   LP bound    A(m,d)")
for (m, d), size in KNOWN.items():
    print(f"{m:2d} {d:2d}  {delsarte_bound(m, d):9.4f}  {size:7d}")
